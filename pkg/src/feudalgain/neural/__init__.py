from .layers import (DenseLayer, LayerError, NoisyLayer, dueling_combine,
                     dueling_combine_backward)
from .network import (ActorCriticNetwork, DuelingQNetwork, MLP, make_layer,
                      softmax)
from .optim import Adam, OptimiserError

__all__ = [
    "ActorCriticNetwork", "Adam", "DenseLayer", "DuelingQNetwork",
    "LayerError", "MLP", "NoisyLayer", "OptimiserError", "dueling_combine",
    "dueling_combine_backward", "make_layer", "softmax",
]

"""Regenerates the bundled toy domain files under a fixed seed.

Run from the repository root:  python scripts/generate_domains.py
"""

import json
import pathlib

import numpy as np

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "feudalgain" / "data"

STREETS = ["mill", "bridge", "station", "king", "queen", "market", "abbey",
           "orchard", "castle", "harbour"]

DOMAINS = {
    "toy_cr": {
        "informable": [
            ("pricerange", ["cheap", "moderate", "expensive"]),
            ("area", ["north", "south", "east", "west", "centre"]),
            ("food", ["italian", "chinese", "indian", "british", "french",
                      "thai", "mexican"]),
        ],
        "extra_requestable": ["name", "address", "phone", "postcode"],
        "synonyms": {
            "cheap": ["inexpensive", "budget", "affordable"],
            "moderate": ["moderately priced", "mid range", "mid-range"],
            "expensive": ["pricey", "upmarket", "fancy"],
            "centre": ["center", "central", "downtown"],
            "address": ["where is it", "located", "location"],
            "phone": ["phone number", "telephone", "number"],
            "postcode": ["post code", "zip", "zip code"],
            "name": ["called", "what is it called"],
        },
        "seed": 20210713,
        "n_entities": 110,
    },
    "toy_sfr": {
        "informable": [
            ("pricerange", ["cheap", "moderate", "expensive", "luxury"]),
            ("area", ["mission", "soma", "marina", "richmond", "sunset",
                      "haight"]),
            ("food", ["italian", "chinese", "indian", "american", "french",
                      "thai", "mexican", "japanese"]),
            ("near", ["park", "museum", "stadium", "beach", "university"]),
            ("goodformeal", ["breakfast", "lunch", "dinner", "brunch"]),
            ("allowskids", ["yes", "no"]),
        ],
        "extra_requestable": ["name", "address", "phone", "postcode"],
        "synonyms": {
            "cheap": ["inexpensive", "budget", "affordable"],
            "expensive": ["pricey", "upmarket", "fancy"],
            "address": ["where is it", "located", "location"],
            "phone": ["phone number", "telephone", "number"],
            "postcode": ["post code", "zip", "zip code"],
            "name": ["called", "what is it called"],
        },
        "seed": 20210714,
        "n_entities": 110,
    },
    "toy_lap": {
        "informable": [
            ("pricerange", ["budget", "midrange", "premium"]),
            ("family", ["ultrabook", "gaming", "workstation", "convertible",
                        "netbook"]),
            ("batteryrating", ["standard", "exceptional"]),
            ("driverange", ["small", "medium", "large"]),
            ("weightrange", ["light", "heavy"]),
            ("processorclass", ["entry", "mainstream", "performance"]),
            ("screensize", ["compact", "widescreen"]),
            ("graphics", ["integrated", "dedicated"]),
            ("warranty", ["basic", "extended"]),
            ("memory", ["small", "adequate", "generous"]),
            ("storagetype", ["hdd", "ssd"]),
            ("ports", ["minimal", "full"]),
            ("build", ["plastic", "aluminium", "rugged"]),
            ("keyboard", ["standard", "backlit"]),
            ("display", ["matte", "touch"]),
            ("cooling", ["passive", "performance"]),
        ],
        "extra_requestable": ["name", "price", "dimension", "utility"],
        "synonyms": {
            "budget": ["cheap", "inexpensive", "affordable"],
            "premium": ["expensive", "high end", "top of the range"],
            "light": ["portable", "lightweight"],
            "price": ["cost", "how much"],
            "dimension": ["dimensions", "size", "how big"],
            "utility": ["purpose", "use case"],
            "name": ["called", "model"],
        },
        "seed": 20210715,
        "n_entities": 2000,
    },
}


def generate(name, spec):
    rng = np.random.default_rng(spec["seed"])
    informable = spec["informable"]
    requestable = [slot for slot, _ in informable] + spec["extra_requestable"]
    ontology = {
        "name": name,
        "informable": [{"slot": slot, "values": values}
                       for slot, values in informable],
        "requestable": requestable,
        "synonyms": spec["synonyms"],
    }
    entities = []
    for i in range(spec["n_entities"]):
        ent = {slot: values[rng.integers(len(values))]
               for slot, values in informable}
        for req in spec["extra_requestable"]:
            if req == "name":
                noun = "venue" if "address" in spec["extra_requestable"] \
                    else "item"
                ent["name"] = f"{name.split('_')[1]} {noun} {i:03d}"
            elif req == "address":
                street = STREETS[rng.integers(len(STREETS))]
                ent["address"] = f"{int(rng.integers(1, 200))} {street} street"
            elif req == "phone":
                ent["phone"] = "01223 " + "".join(
                    str(rng.integers(10)) for _ in range(6))
            elif req == "postcode":
                ent["postcode"] = (
                    f"cb{int(rng.integers(1, 30))} {int(rng.integers(1, 9))}"
                    f"{chr(97 + rng.integers(26))}{chr(97 + rng.integers(26))}")
            elif req == "price":
                ent["price"] = f"{int(rng.integers(300, 3000))} pounds"
            elif req == "dimension":
                ent["dimension"] = (f"{int(rng.integers(29, 40))} x "
                                    f"{int(rng.integers(20, 28))} cm")
            elif req == "utility":
                ent["utility"] = ["office", "travel", "gaming", "design",
                                  "study"][rng.integers(5)]
        entities.append(ent)
    database = {"entities": entities}
    return ontology, database


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    for name, spec in DOMAINS.items():
        ontology, database = generate(name, spec)
        (DATA_DIR / f"{name}.ontology.json").write_text(
            json.dumps(ontology, indent=2) + "\n", encoding="utf-8")
        (DATA_DIR / f"{name}.db.json").write_text(
            json.dumps(database, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {name}: {len(database['entities'])} entities")


if __name__ == "__main__":
    main()

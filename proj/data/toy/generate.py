#!/usr/bin/env python3
"""Writes the toy product KG used by the CLI smoke tests and README examples."""
import json
import zlib
import random
from pathlib import Path

rng = random.Random(7)
here = Path(__file__).resolve().parent

taxonomy = {
    "Electronics": "Product", "Food": "Product", "Apparel": "Product",
    "Phone": "Electronics", "Laptop": "Electronics", "Headphones": "Electronics",
    "Snack": "Food", "Tea": "Food", "Shoes": "Apparel", "Jacket": "Apparel",
}
leaves = ["Phone", "Laptop", "Headphones", "Snack", "Tea", "Shoes", "Jacket"]
brands = {leaf: [f"brand_{leaf.lower()}_{i}" for i in range(3)] for leaf in leaves}
places = ["Shenzhen", "Hangzhou", "Shanghai", "Fujian", "Yunnan", "Guangzhou"]
materials = ["plastic", "aluminium", "cotton", "leather", "paper"]

triples = [(child, "rdfs:subClassOf", parent) for child, parent in taxonomy.items()]
products = []
for i in range(240):
    leaf = leaves[i % len(leaves)]
    item = f"item_{i:03d}"
    products.append(item)
    brand = rng.choice(brands[leaf])
    triples.append((item, "category", leaf))
    triples.append((item, "brandIs", brand))
    # Origin follows the brand most of the time.
    origin = places[zlib.crc32(brand.encode()) % len(places)] if rng.random() < 0.8 else rng.choice(places)
    triples.append((item, "placeOfOrigin", origin))
    if leaf in ("Shoes", "Jacket", "Headphones", "Laptop") or rng.random() < 0.3:
        triples.append((item, "material", rng.choice(materials)))
for leaf, names in brands.items():
    for name in names:
        triples.append((name, "brandLocatedIn", places[zlib.crc32(name.encode()) % len(places)]))
triples.append(("Phone", "owl:equivalentClass", "Smartphone"))

with open(here / "full.tsv", "w") as f:
    for h, r, t in triples:
        f.write(f"{h}\t{r}\t{t}\n")

nodes = {name: "Class" for name in list(taxonomy) + ["Product", "Smartphone"]}
nodes.update({item: "Instance" for item in products})
nodes.update({name: "Instance" for names in brands.values() for name in names})
nodes.update({place: "Concept" for place in places})
nodes.update({m: "Literal" for m in materials})
schema = {
    "nodes": nodes,
    "relations": {
        "rdfs:subClassOf": {"kind": "meta", "domain": ["Class"], "range": ["Class"]},
        "owl:equivalentClass": {"kind": "meta", "domain": ["Class"], "range": ["Class"]},
        "category": {"kind": "object", "domain": ["Instance"], "range": ["Class"]},
        "brandIs": {"kind": "object", "domain": ["Instance"], "range": ["Instance"]},
        "placeOfOrigin": {"kind": "object", "domain": ["Instance"], "range": ["Concept"]},
        "brandLocatedIn": {"kind": "object", "domain": ["Instance"], "range": ["Concept"]},
        "material": {"kind": "data", "domain": ["Instance"], "range": ["Literal"]},
    },
    "taxonomy_from_triples": True,
}
(here / "schema.json").write_text(json.dumps(schema, indent=1, sort_keys=True) + "\n")

sampler = {"alpha": 0.9, "alpha_head": 0.8, "alpha_tail": 0.4, "head_quantile": 0.5,
           "dev_size": 30, "test_size": 30, "seed": 42}
(here / "sampler.json").write_text(json.dumps(sampler, indent=1) + "\n")

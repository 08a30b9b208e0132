#!/usr/bin/env python3
"""Writes the planted-expert test corpus.

Three topics, three query subtopics per topic. Each subtopic has one planted
author whose documents are the only ones that discuss both of its entities
in depth; three further authors write general material on one topic each.
The qrels mark only the planted author as relevant, so a correct pipeline
puts that author first for every query.
"""

import argparse
import pathlib
import random

TOPICS = {
    "ml": {
        "general": [
            ("machine learning", "Machine_learning"),
            ("neural network", "Artificial_neural_network"),
            ("optimization", "Mathematical_optimization"),
        ],
        "pairs": [
            (("convolutional network", "Convolutional_neural_network"),
             ("image segmentation", "Image_segmentation")),
            (("reinforcement learning", "Reinforcement_learning"),
             ("policy gradient", "Policy_gradient_method")),
            (("topic model", "Topic_model"),
             ("latent dirichlet allocation", "Latent_Dirichlet_allocation")),
        ],
    },
    "bio": {
        "general": [
            ("molecular biology", "Molecular_biology"),
            ("gene expression", "Gene_expression"),
            ("protein", "Protein"),
        ],
        "pairs": [
            (("crispr", "CRISPR"), ("genome editing", "Genome_editing")),
            (("protein folding", "Protein_folding"),
             ("molecular dynamics", "Molecular_dynamics")),
            (("rna sequencing", "RNA-Seq"), ("single cell", "Single-cell_analysis")),
        ],
    },
    "astro": {
        "general": [
            ("astrophysics", "Astrophysics"),
            ("telescope", "Telescope"),
            ("galaxy", "Galaxy"),
        ],
        "pairs": [
            (("dark matter", "Dark_matter"), ("gravitational lensing", "Gravitational_lens")),
            (("exoplanet", "Exoplanet"), ("transit photometry", "Transit_method")),
            (("supernova", "Supernova"), ("neutron star", "Neutron_star")),
        ],
    },
}

# Entities with no author evidence; they give the link graph some bulk.
BACKGROUND = [
    "Mathematics", "Physics", "Chemistry", "Statistics", "Computer_science",
    "Biology", "Science", "Research", "University", "Experiment",
    "Computer_network", "Star", "Cell_(biology)",
]

# Surfaces whose link confidence is below the evidence threshold.
WEAK = [
    ("network", "Computer_network", 0.15),
    ("star", "Star", 0.18),
    ("cell", "Cell_(biology)", 0.12),
    ("experiment", "Experiment", 0.1),
]

FILLER = (
    "we present a novel approach study results method analysis data framework "
    "experiments show improved performance evaluation across several settings "
    "this work describes careful measurements baseline comparison findings "
    "suggest further directions overall"
).split()

NAMES = [
    "Ada Lovelace", "Alan Turing", "Grace Hopper", "Barbara McClintock",
    "Rosalind Franklin", "Francis Crick", "Vera Rubin", "Subrahmanyan Chandrasekhar",
    "Jocelyn Bell", "Claude Shannon", "Gregor Mendel", "Edwin Hubble",
]


def sentence(rng, surfaces, filler_words=6):
    words = [rng.choice(FILLER) for _ in range(filler_words)]
    for s in surfaces:
        words.insert(rng.randrange(len(words) + 1), s)
    return " ".join(words) + "."


def build(seed):
    rng = random.Random(seed)
    authors = []
    docs = []
    queries = []
    qrels = []
    dictionary = []
    entities = set(BACKGROUND)
    links = set()

    def link(a, b):
        if a != b:
            links.add((a, b))

    doc_no = 0

    def add_doc(title, body, author_ids, kind):
        nonlocal doc_no
        doc_no += 1
        docs.append((f"d{doc_no:03d}", title, body, ";".join(author_ids), kind))

    author_no = 0
    topic_authors = {}
    for t_index, (topic, spec) in enumerate(TOPICS.items()):
        general = spec["general"]
        for surface, eid in general:
            dictionary.append((surface, eid, 0.8))
            entities.add(eid)
        for (s1, e1), (s2, e2) in spec["pairs"]:
            for surface, eid in ((s1, e1), (s2, e2)):
                dictionary.append((surface, eid, 0.9))
                entities.add(eid)

        # Dense links inside a topic, sparse background links.
        topic_entities = [e for _, e in general] + [
            e for pair in spec["pairs"] for _, e in pair
        ]
        for a in topic_entities:
            for b in topic_entities:
                if a != b and rng.random() < 0.55:
                    link(a, b)
            for g in rng.sample(BACKGROUND, 3):
                link(g, a)
                link(a, g)
        for (_, e1), (_, e2) in spec["pairs"]:
            link(e1, e2)
            link(e2, e1)

        topic_authors[topic] = []
        for q_index, ((s1, e1), (s2, e2)) in enumerate(spec["pairs"]):
            author_no += 1
            aid = f"a{author_no:02d}"
            authors.append((aid, NAMES[author_no - 1]))
            topic_authors[topic].append(aid)
            for k in range(4):
                g = general[(q_index + k) % len(general)][0]
                body = " ".join([
                    sentence(rng, [s1, s2]),
                    sentence(rng, [s1, g]),
                    sentence(rng, [s2]),
                ])
                add_doc(f"{s1} and {s2} {k + 1}", body, [aid], "paper")
            qid = f"q{t_index * 3 + q_index + 1}"
            queries.append((qid, f"{s1} {s2}"))
            qrels.append((qid, aid, 1))

    # General authors: one per topic, broad documents with a single passing
    # mention of some specific entity.
    for topic, spec in TOPICS.items():
        author_no += 1
        aid = f"a{author_no:02d}"
        authors.append((aid, NAMES[author_no - 1]))
        general = [s for s, _ in spec["general"]]
        specifics = [p[0][0] for p in spec["pairs"]]
        for k in range(3):
            body = " ".join([
                sentence(rng, general[:2]),
                sentence(rng, [general[2], specifics[k]]),
                sentence(rng, ["network" if topic == "ml" else "cell" if topic == "bio" else "star"]),
            ])
            add_doc(f"survey of {topic} part {k + 1}", body, [aid], "course_page")
        # A co-authored overview with the first planted author of the topic.
        body = sentence(rng, general) + " " + sentence(rng, ["experiment"])
        add_doc(f"{topic} overview", body, [aid, topic_authors[topic][0]], "thesis")

    for surface, eid, score in WEAK:
        dictionary.append((surface, eid, score))
    for i, a in enumerate(BACKGROUND):
        for b in BACKGROUND[i + 1:i + 3]:
            link(a, b)
            link(b, a)

    return {
        "authors": authors,
        "docs": docs,
        "queries": queries,
        "qrels": qrels,
        "dictionary": sorted(dictionary),
        "entities": sorted(entities),
        "links": sorted(links),
    }


def write(out, data):
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "authors.tsv", "w") as f:
        for aid, name in data["authors"]:
            f.write(f"{aid}\t{name}\n")
    with open(out / "documents.tsv", "w") as f:
        for row in data["docs"]:
            f.write("\t".join(row) + "\n")
    with open(out / "queries.tsv", "w") as f:
        for qid, text in data["queries"]:
            f.write(f"{qid}\t{text}\n")
    with open(out / "qrels.txt", "w") as f:
        for qid, aid, grade in data["qrels"]:
            f.write(f"{qid} 0 {aid} {grade}\n")
    with open(out / "dictionary.tsv", "w") as f:
        for surface, eid, score in data["dictionary"]:
            f.write(f"{surface}\t{eid}\t{score}\n")
    with open(out / "snapshot.tsv", "w") as f:
        f.write(f"#entities {len(data['entities'])}\n")
        for e in data["entities"]:
            f.write(f"E\t{e}\n")
        for a, b in data["links"]:
            f.write(f"L\t{a}\t{b}\n")
    with open(out / "engine.conf", "w") as f:
        f.write(
            "# Planted-expert fixture\n"
            "documents = documents.tsv\n"
            "authors = authors.tsv\n"
            "dictionary = dictionary.tsv\n"
            "snapshot = snapshot.tsv\n"
            "seed = 7\n"
            "dim = 32\n"
            "walks_per_node = 10\n"
            "walk_length = 20\n"
            "epochs = 2\n"
            "threads = 1\n"
        )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", type=pathlib.Path)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    write(args.out, build(args.seed))


if __name__ == "__main__":
    main()

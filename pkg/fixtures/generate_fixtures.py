"""Regenerate the 50-object BM/PD fixture tables and the small subsets.

The output is fully determined by SEED, so rerunning this script must leave
the checked-in CSV files unchanged.
"""
from __future__ import annotations

import csv
import random
from pathlib import Path

SEED = 20230528
N_OBJECTS = 50
HERE = Path(__file__).resolve().parent

BM_COLUMNS = ["id", "titolo", "tipologia", "autore", "autore_fonte", "tecnica", "data",
              "istituzione", "relazione", "parole_chiave", "etichetta"]
PD_COLUMNS = ["id", "tecnica", "strumento", "acq_responsabile", "acq_responsabile_fonte",
              "acq_ente", "acq_inizio", "acq_fine", "software", "elab_responsabile",
              "elab_responsabile_fonte", "elab_inizio", "elab_fine"]

TITLES = [
    ("De animalibus insectis", "la"), ("Ornithologiae hoc est de avibus historiae", "la"),
    ("Monstrorum historia", "la"), ("Dendrologiae naturalis", "la"),
    ("Tavola di piante acquatiche", "it"), ("Erbario secco, volume", "it"),
    ("Carta del territorio bolognese", "it"), ("Serpentum et draconum historiae", "la"),
    ("Musaeum metallicum", "la"), ("Quadrupedum omnium bisulcorum historia", "la"),
    ("Studio di conchiglia", None), ("Xilografia con pesce volante", "it"),
]
AUTHORS = [
    ("Ulisse Aldrovandi", "Aldrovandi, Ulisse (VIAF 123456)"),
    ("Giovanni Battista Cavagna", "ULAN 500012345"),
    ("Jacopo Ligozzi", "ULAN:500023456"),
    ("Cornelio Schwindt", "VIAF: 98765432"),
    ("Bartolomeo Ambrosini", "viaf 55511122"),
    ("Lorenzo Bennini", None),
    ("Teodoro Ghisi", "nessuna fonte"),
]
DOC_TYPES = ["printed book", "manuscript", "map", "specimen", "scientific instrument",
             "Printed Book", "globe"]
TECHNIQUES = ["etching", "engraving", "woodcut", "watercolor", "drawing", "taxidermy",
              "mezzotint"]
KEEPERS = ["Biblioteca Universitaria di Bologna", "Museo di Palazzo Poggi",
           "Sistema Museale di Ateneo", "Archiginnasio"]
KEYWORDS = ["insetti", "uccelli", "mostri", "botanica", "zoologia", "mineralogia",
            "cartografia", "pesci"]
ACQ_TECHNIQUES = ["photogrammetry", "structured light", "laser scanning", "Photogrammetry"]
DEVICES = ["Nikon D7200", "Artec Eva", "Artec Leo", "Canon EOS 5D Mark IV"]
OPERATORS = [
    ("Marta Ferrini", "0000-0002-1825-0097"),
    ("Paolo Gentilini", "ORCID: 0000-0001-5000-0007"),
    ("Chiara Valdrè", "https://orcid.org/0000-0003-0000-0001"),
    ("Nicola Sarti", None),
    ("Elena Morandi", "0000-0001-0000-000X"),
]
INSTITUTIONS = ["Università di Bologna", "Centro di Ricerca DH", "Laboratorio 3D"]
SOFTWARE = ["Agisoft Metashape", "Artec Studio", "Blender", "MeshLab"]


def _maybe(rng: random.Random, value, p_null: float):
    return None if rng.random() < p_null else value


def _iso(rng: random.Random, year: int) -> str:
    return f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"


def bm_row(rng: random.Random, i: int) -> dict:
    if i == 1:
        # pinned first row: the canonical single-row example
        return {"id": "obj1", "titolo": "De animalibus insectis@la", "tipologia": "printed book",
                "autore": "Ulisse Aldrovandi", "autore_fonte": "Aldrovandi, Ulisse (VIAF 123456)",
                "tecnica": "etching; engraving", "data": "1602",
                "istituzione": "Biblioteca Universitaria di Bologna", "relazione": "keeper",
                "parole_chiave": "insetti; zoologia", "etichetta": "Volume a stampa"}
    title, lang = rng.choice(TITLES)
    title = f"{title} {rng.randint(1, 9)}" if rng.random() < 0.3 else title
    author, source = rng.choice(AUTHORS)
    start = rng.randint(1550, 1610)
    data = rng.choice([str(start), f"{start}-{start + rng.randint(1, 15)}", "s.d."])
    techniques = rng.sample(TECHNIQUES, rng.randint(1, 2))
    sep = rng.choice(["; ", " | ", ";"])
    return {
        "id": f"obj{i}",
        "titolo": f"{title}@{lang}" if lang else title,
        "tipologia": _maybe(rng, rng.choice(DOC_TYPES), 0.05),
        "autore": _maybe(rng, author, 0.1),
        "autore_fonte": source,
        "tecnica": _maybe(rng, sep.join(techniques), 0.1),
        "data": _maybe(rng, data, 0.1),
        "istituzione": rng.choice(KEEPERS),
        "relazione": rng.choice(["keeper", "owner", "Keeper"]),
        "parole_chiave": _maybe(rng, sep.join(rng.sample(KEYWORDS, rng.randint(1, 3))), 0.2),
        "etichetta": _maybe(rng, f"Oggetto {i}", 0.1),
    }


def pd_row(rng: random.Random, i: int) -> dict:
    year = rng.choice([2021, 2022, 2023])
    acq_person, acq_source = rng.choice(OPERATORS)
    elab_person, elab_source = rng.choice(OPERATORS)
    acq_start = _iso(rng, year)
    elab_start = _iso(rng, year + 1)
    return {
        "id": f"obj{i}",
        "tecnica": _maybe(rng, rng.choice(ACQ_TECHNIQUES), 0.05),
        "strumento": _maybe(rng, rng.choice(DEVICES), 0.1),
        "acq_responsabile": acq_person,
        "acq_responsabile_fonte": acq_source,
        "acq_ente": _maybe(rng, rng.choice(INSTITUTIONS), 0.2),
        "acq_inizio": acq_start,
        "acq_fine": rng.choice([acq_start, _iso(rng, year), "2023-02-30"]),
        "software": _maybe(rng, rng.choice(SOFTWARE), 0.1),
        "elab_responsabile": elab_person,
        "elab_responsabile_fonte": elab_source,
        "elab_inizio": elab_start,
        "elab_fine": _maybe(rng, _iso(rng, year + 1), 0.2),
    }


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if v is None else v for k, v in row.items()})


def main() -> None:
    rng = random.Random(SEED)
    bm = [bm_row(rng, i) for i in range(1, N_OBJECTS + 1)]
    pd = [pd_row(rng, i) for i in range(1, N_OBJECTS + 1)]
    write_csv(HERE / "data" / "bm.csv", BM_COLUMNS, bm)
    write_csv(HERE / "data" / "pd.csv", PD_COLUMNS, pd)
    write_csv(HERE / "small" / "bm_1row.csv", BM_COLUMNS, bm[:1])
    write_csv(HERE / "small" / "bm_5row.csv", BM_COLUMNS, bm[:5])
    write_csv(HERE / "small" / "pd_5row.csv", PD_COLUMNS, pd[:5])


if __name__ == "__main__":
    main()

"""The 10-paper offline fixture corpus used by pipeline/service/CLI tests.

Composition (hand-derived expectations noted inline):
  P1-P4   dataset-positive -> exactly these four produce records
  P5-P7   gate-negative (P7 sits exactly at the 0.5 boundary)
  P8-P9   gate-positive but zero description-positive sentences
  P10     gate-positive, zero-positive AND e-print source 404, which
          forces link extraction onto the PDF-text fallback path

Expected records (timestamps aside):
  P1: huggingface URL, rule score 21 (host 10 + path 3 + capped lexical 8),
      margin accept over the github candidate; two-sentence description.
  P2: zenodo URL, score 13 (9 + 2 + 2), single_candidate accept.
  P3: kaggle URL, score 15 (8 + 3 + 4), preferred_host accept at tau_min.
  P4: no reliable dataset link: best candidate scores 10 (< 15),
      rejected_below_min; the record still exists with dataset_url null.
"""

from __future__ import annotations

import json
from pathlib import Path

from conftest import FixtureBuilder, make_feed, make_gz, make_targz, make_tei

GROBID_URL = "http://grobid.test"
FEED_PAGE_1 = ("https://export.arxiv.org/api/query?search_query=cat%3Acs.IR+OR+cat%3A"
               "cs.DB+OR+cat%3Acs.AI+OR+cat%3Acs.CL+OR+cat%3Acs.CV+OR+cat%3Acs.MA"
               "&start=0&max_results=100&sortBy=submittedDate&sortOrder=descending")

WINDOW_START = "2024-01-01T00:00:00+00:00"
WINDOW_END = "2024-02-01T00:00:00+00:00"

PAPERS = [
    {
        "paper_id": "2401.00001v1",
        "title": "Multimodal Document Retrieval with Page Context",
        "abstract": ("We release a new dataset and benchmark for multimodal document "
                     "retrieval, publicly available at the project page."),
        "categories": ["cs.IR", "cs.CL"],
        "published": "2024-01-05T10:00:00Z",
    },
    {
        "paper_id": "2401.00002v1",
        "title": "Graded Discourse Dialogues",
        "abstract": ("We introduce a dataset of annotated dialogues, a new corpus "
                     "for discourse study."),
        "categories": ["cs.CL"],
        "published": "2024-01-05T11:00:00Z",
    },
    {
        "paper_id": "2401.00003v1",
        "title": "Spatial Reasoning over Indoor Scenes",
        "abstract": ("Our new benchmark provides annotated indoor scenes; the dataset "
                     "is publicly available."),
        "categories": ["cs.CV"],
        "published": "2024-01-05T12:00:00Z",
    },
    {
        "paper_id": "2401.00004v1",
        "title": "Structure Extraction from Tabular Documents",
        "abstract": ("We construct a dataset of tabular documents and release "
                     "annotated labels."),
        "categories": ["cs.DB"],
        "published": "2024-01-05T13:00:00Z",
    },
    {
        "paper_id": "2401.00005v1",
        "title": "Sparse Attention for Efficient Inference",
        "abstract": "We propose a new attention mechanism for efficient inference.",
        "categories": ["cs.AI"],
        "published": "2024-01-05T14:00:00Z",
    },
    {
        "paper_id": "2401.00006v1",
        "title": "Improving Retrieval without Retraining",
        "abstract": "Our method improves results on one existing dataset without retraining.",
        "categories": ["cs.CV"],
        "published": "2024-01-05T15:00:00Z",
    },
    {
        "paper_id": "2401.00007v1",
        "title": "A Survey of Evaluation Practices",
        "abstract": "A survey of benchmark practices and dataset usage in evaluation.",
        "categories": ["cs.CL"],
        "published": "2024-01-05T16:00:00Z",
    },
    {
        "paper_id": "2401.00008v1",
        "title": "Long-Horizon Planning Agents",
        "abstract": "We release a new dataset for long-horizon planning agents.",
        "categories": ["cs.IR"],
        "published": "2024-01-05T17:00:00Z",
    },
    {
        "paper_id": "2401.00009v1",
        "title": "Simulated Negotiation Strategies",
        "abstract": "We introduce a benchmark with a new corpus of simulated negotiations.",
        "categories": ["cs.MA"],
        "published": "2024-01-05T18:00:00Z",
    },
    {
        "paper_id": "2401.00010v1",
        "title": "Tooling for Agent Evaluation",
        "abstract": "Our agents dataset is publicly available; we release evaluation tooling.",
        "categories": ["cs.CL"],
        "published": "2024-01-05T19:00:00Z",
    },
]

TEI_DOCS = {
    "2401.00001v1": [
        ("Introduction", [
            "We study multimodal document retrieval in realistic settings.",
            "Prior systems cover only isolated pages.",
        ]),
        ("Dataset", [
            "Our dataset contains 12,480 annotated pairs drawn from long documents.",
            "We annotate each pair with graded relevance labels.",
        ]),
        ("Experiments", [
            "Training follows a standard bi-encoder recipe.",
            "Strong gains emerge over lexical retrieval systems.",
        ]),
    ],
    "2401.00002v1": [
        ("Introduction", ["Dialogue understanding requires discourse context."]),
        ("Corpus", [
            "Our corpus contains 3,200 annotated documents collected from online forums.",
            "Annotators marked discourse relations between turns.",
            "Agreement was measured on a held-out subset.",
        ]),
        ("Results", ["Baselines struggle with implicit relations."]),
    ],
    "2401.00003v1": [
        ("Introduction", [
            "Spatial reasoning needs grounded scene context.",
            "Existing resources focus on synthetic layouts.",
        ]),
        ("Data", [
            "The dataset contains 9,100 images with room-level labels.",
            "Scenes were captured across forty buildings.",
        ]),
        ("Tasks", ["Evaluation covers three reasoning tasks."]),
    ],
    "2401.00004v1": [
        ("Introduction", ["Tables carry dense numeric structure."]),
        ("Data", [
            "We collected 4,000 annotated tables with cell-level types.",
            "Annotation quality was verified by two reviewers.",
        ]),
        ("Method", [
            "Parsing uses a lightweight grammar.",
            "Downstream extraction improves markedly.",
        ]),
    ],
    "2401.00008v1": [
        (None, [
            "Planning agents act over long horizons.",
            "Our method decomposes goals into subgoals.",
            "Execution traces reveal systematic failures.",
            "Future work targets richer environments.",
        ]),
    ],
    "2401.00009v1": [
        (None, [
            "Negotiation requires modeling partner intent.",
            "We simulate dialogues between strategic agents.",
            "Agents adapt their offers over rounds.",
            "Outcomes depend on initial endowments.",
        ]),
    ],
    "2401.00010v1": [
        (None, [
            "Evaluation tooling shapes agent research.",
            "Our harness replays logged interactions.",
            "The models and harness are hosted at https://zenodo.org/record/777 for review.",
            "Reports aggregate across task suites.",
        ]),
    ],
}

P1_MAIN_TEX = r"""\documentclass{article}
\begin{document}
\section{Introduction}
Retrieval over long documents remains difficult. Prior collections cover isolated pages only.
\section{Data Release}
We release the collection publicly for research. The full dataset is described below.
See \href{https://huggingface.co/datasets/acme/docpairs}{our dataset} hosted on the hub.
It is available at the hub mirror as well. Baselines accompany the data cards.
\section{Reproducibility}
Our source code is public. The implementation details live in the repository.
All scripts run via \url{https://github.com/acme/docpair-code} on commodity hardware.
Dependencies are pinned. Evaluation completes in an hour.
\end{document}
"""

P1_REFS_BIB = r"""@misc{docpairs,
  title = {DocPairs collection},
  howpublished = {\url{https://huggingface.co/datasets/acme/docpairs}},
}
"""

P2_MAIN_TEX = r"""\documentclass{article}
\begin{document}
Dialogue research benefits from stable archives. Hosting matters for longevity.
The annotated corpus is available at a permanent archive. Versioned deposits preserve integrity.
Download it via \url{https://zenodo.org/record/5150} with a single request.
Checksums accompany every file. Mirrors update weekly.
\end{document}
"""

P3_MAIN_TEX = r"""\documentclass{article}
\begin{document}
Indoor scenes need careful curation. Capture spanned forty buildings.
The dataset is \href{https://www.kaggle.com/datasets/acme/scenes}{the dataset} for public use.
It is available at the mirror too. Masks ship in a separate archive.
A related approach appears elsewhere. Details of that system differ substantially.
The preprint sits at \url{https://arxiv.org/abs/2312.99999} in the archive.
Readers may compare both methods. Our conclusions hold regardless.
Tooling lives in a repository. The implementation uses standard code paths.
Clone it from \url{https://github.com/acme/scenes-code} before running.
Unit tests cover the loaders. Configuration files are documented.
\end{document}
"""

P4_PAPER_TEX = r"""\documentclass{article}
\begin{document}
Tabular documents resist generic parsers. Cell types need explicit schema.
Our dataset is hosted by the lab. We release the annotated tables there.
Fetch them from \url{https://nlp.univ-example.edu/data/tables} after registration.
The bundle is available at the lab page too. Licenses permit research use.
A companion preprint is \url{https://arxiv.org/abs/2312.88888} for details.
Methods build on grammar constraints. Decoding stays deterministic.
\end{document}
"""

P8_MAIN_TEX = r"""\documentclass{article}
\begin{document}
Planning agents act over long horizons. Goal decomposition helps exploration.
Our source code is at \url{https://github.com/acme/planner} with the implementation notes.
Training curves are in the appendix. Ablations isolate the scheduler.
\end{document}
"""

P9_MAIN_TEX = r"""\documentclass{article}
\begin{document}
Negotiation requires modeling partner intent. We simulate strategic exchanges.
Offers adapt over successive rounds. Outcomes depend on endowments.
\end{document}
"""

SOURCES = {
    "2401.00001v1": ("targz", {"main.tex": P1_MAIN_TEX, "refs.bib": P1_REFS_BIB}),
    "2401.00002v1": ("targz", {"main.tex": P2_MAIN_TEX}),
    "2401.00003v1": ("targz", {"main.tex": P3_MAIN_TEX}),
    "2401.00004v1": ("gz", ("paper.tex", P4_PAPER_TEX)),
    "2401.00005v1": None,  # never fetched: gate-negative
    "2401.00006v1": None,
    "2401.00007v1": None,
    "2401.00008v1": ("targz", {"main.tex": P8_MAIN_TEX}),
    "2401.00009v1": ("targz", {"main.tex": P9_MAIN_TEX}),
    "2401.00010v1": "missing",  # 404 -> pdf-text fallback
}

# Dataset-record expectations for P1-P4, timestamps excluded.
EXPECTED_RECORDS = {
    "2401.00001v1": {
        "dataset_url": "https://huggingface.co/datasets/acme/docpairs",
        "link_score": 21,
        "selection_reason": "margin",
        "gate_score": 13 / 17,
        "description": ("Our dataset contains 12,480 annotated pairs drawn from long "
                        "documents. We annotate each pair with graded relevance labels."),
    },
    "2401.00002v1": {
        "dataset_url": "https://zenodo.org/record/5150",
        "link_score": 13,
        "selection_reason": "single_candidate",
        "gate_score": 12 / 16,
        "description": ("Our corpus contains 3,200 annotated documents collected from "
                        "online forums."),
    },
    "2401.00003v1": {
        "dataset_url": "https://www.kaggle.com/datasets/acme/scenes",
        "link_score": 15,
        "selection_reason": "preferred_host",
        "gate_score": 11 / 15,
        "description": "The dataset contains 9,100 images with room-level labels.",
    },
    "2401.00004v1": {
        "dataset_url": None,
        "link_score": None,
        "selection_reason": "rejected_below_min",
        "gate_score": 7 / 11,
        "description": "We collected 4,000 annotated tables with cell-level types.",
    },
}

CONFIG = {
    "categories": ["cs.IR", "cs.DB", "cs.AI", "cs.CL", "cs.CV", "cs.MA"],
    "window": {"start": WINDOW_START, "end": WINDOW_END},
    "gate_threshold": 0.5,
    "desc_threshold": 0.5,
    "link_mode": "rule_only",
    "thresholds": {"tau_high": 22, "tau_mid": 16, "delta": 5, "top_k": 5, "tau_min": 15},
    "worker_count": 2,
    "max_downloads": 2,
    "verifier_enabled": False,
    "settings": {"docparse.service_url": GROBID_URL},
}


def stub_pdf(paper_id: str) -> bytes:
    return (f"%PDF-1.4\n% paper: {paper_id}\n"
            "1 0 obj\n<< /Type /Catalog >>\nendobj\ntrailer\n%%EOF\n").encode()


def build_corpus(root: Path) -> Path:
    """Write the full fixture directory plus config.json; returns root."""
    builder = FixtureBuilder(root)
    builder.add_get(FEED_PAGE_1,
                    builder.entry(make_feed(PAPERS), content_type="application/atom+xml",
                                  suffix=".xml"))
    dispatch = []
    for paper in PAPERS:
        paper_id = paper["paper_id"]
        builder.add_get(f"https://arxiv.org/pdf/{paper_id}.pdf",
                        builder.entry(stub_pdf(paper_id), content_type="application/pdf",
                                      suffix=".pdf"))
        if paper_id in TEI_DOCS:
            dispatch.append({
                "body_contains": paper_id,
                "response": builder.entry(make_tei(TEI_DOCS[paper_id]),
                                          content_type="application/xml", suffix=".xml"),
            })
        source = SOURCES[paper_id]
        source_url = f"https://arxiv.org/e-print/{paper_id}"
        if source == "missing":
            builder.add_get(source_url, {"status": 404})
        elif source is not None:
            kind, payload = source
            if kind == "targz":
                body = make_targz(payload)
            else:
                name, content = payload
                body = make_gz(content, name=name)
            builder.add_get(source_url, builder.entry(body, suffix=".gz"))
    builder.add_post(GROBID_URL + "/api/processFulltextDocument",
                     {"dispatch": dispatch, "default": {"status": 500}})
    builder.build()
    (root / "config.json").write_text(json.dumps(CONFIG, indent=1), "utf-8")
    return root

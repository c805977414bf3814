"""Static site generation: entity pages, search index, statistics page and
per-entity data files."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from html import escape
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from ..chad.catalogue import MODEL_PREFIXES
from ..chad.stats import StatsReport
from ..rdf import (EXTENSIONS, FORMATS, RDF_TYPE, Graph, Iri, Literal, NamespaceTable, Term,
                   Triple, serialize, term_to_nt)
from ..transforms import slugify

RDFS_LABEL = Iri("http://www.w3.org/2000/01/rdf-schema#label")
CRM_SYMBOLIC_CONTENT = Iri("http://www.cidoc-crm.org/cidoc-crm/P190_has_symbolic_content")
DEFAULT_LABEL_PROPERTIES = (RDFS_LABEL, CRM_SYMBOLIC_CONTENT)
ASSETS = ("search.js", "style.css")

DEFAULT_EXAMPLE_QUERIES = (
    ("Works and their titles",
     "SELECT ?work ?title WHERE {\n"
     "  ?work a lrmoo:F1_Work .\n"
     "  ?t crm:P102i_is_title_of ?work ;\n"
     "     crm:P190_has_symbolic_content ?title .\n"
     "}"),
    ("Digitisation processes and their operators",
     "SELECT ?process ?actor WHERE {\n"
     "  ?process a crmdig:D2_Digitization_Process ;\n"
     "           crm:P14_carried_out_by ?actor .\n"
     "}"),
    ("Entities with a label", "SELECT ?s ?label WHERE { ?s rdfs:label ?label . } LIMIT 50"),
)


class SiteError(OSError):
    pass


@dataclass
class SiteConfig:
    base_iri: str
    output_dir: Path = Path("site")
    site_title: str = "Knowledge graph"
    label_properties: tuple[Iri, ...] = DEFAULT_LABEL_PROPERTIES
    namespaces: NamespaceTable = field(default_factory=NamespaceTable)
    example_queries: tuple[tuple[str, str], ...] = DEFAULT_EXAMPLE_QUERIES
    formats: tuple[str, ...] = field(default=FORMATS, init=False)

    def __post_init__(self):
        Iri(self.base_iri)
        if not self.base_iri.endswith("/"):
            raise ValueError(f"base IRI must end with '/': {self.base_iri!r}")
        self.output_dir = Path(self.output_dir)

    def is_internal(self, term: Term) -> bool:
        return isinstance(term, Iri) and term.value.startswith(self.base_iri) \
            and len(term.value) > len(self.base_iri)


@dataclass(frozen=True)
class EntityPage:
    subject: Iri
    label: str
    slug: str
    classes: tuple[Iri, ...]
    outbound: tuple[tuple[Iri, Term], ...]
    inbound: tuple[tuple[Term, Iri], ...]

    @property
    def triples(self) -> list[Triple]:
        return [Triple(self.subject, p, o) for p, o in self.outbound]


def _nt_key(pair) -> tuple[str, str]:
    return term_to_nt(pair[0]), term_to_nt(pair[1])


def internal_subjects(g: Graph, cfg: SiteConfig) -> list[Iri]:
    return sorted((s for s in g.subjects() if cfg.is_internal(s)), key=lambda s: s.value)


def assign_slugs(subjects: Iterable[Iri], cfg: SiteConfig) -> dict[Iri, str]:
    """Slug per subject; collisions get ``-2``, ``-3``... in IRI order."""
    out: dict[Iri, str] = {}
    taken: set[str] = set()
    for s in sorted(subjects, key=lambda s: s.value):
        base = slugify(s.value[len(cfg.base_iri):]) or "entity"
        slug, n = base, 1
        while slug in taken:
            n += 1
            slug = f"{base}-{n}"
        taken.add(slug)
        out[s] = slug
    return out


def local_name(iri: Iri) -> str:
    value = iri.value.rstrip("/#")
    cut = max(value.rfind("/"), value.rfind("#"))
    return value[cut + 1:] or iri.value


def entity_label(g: Graph, subject: Iri, properties: Sequence[Iri]) -> str:
    for prop in properties:
        literals = sorted((o for o in g.objects(subject, prop) if isinstance(o, Literal)),
                          key=term_to_nt)
        if literals:
            return literals[0].lexical
    return local_name(subject)


def build_entity_page(g: Graph, subject: Iri, slug: str, cfg: SiteConfig) -> EntityPage:
    outbound = sorted(((t.predicate, t.object) for t in g.triples(subject, None, None)), key=_nt_key)
    inbound = sorted(((t.subject, t.predicate) for t in g.triples(None, None, subject)), key=_nt_key)
    classes = sorted((o for p, o in outbound if p == RDF_TYPE and isinstance(o, Iri)),
                     key=lambda c: c.value)
    return EntityPage(subject, entity_label(g, subject, cfg.label_properties), slug,
                      tuple(classes), tuple(outbound), tuple(inbound))


def entity_pages(g: Graph, cfg: SiteConfig) -> list[EntityPage]:
    slugs = assign_slugs(internal_subjects(g, cfg), cfg)
    return [build_entity_page(g, s, slug, cfg) for s, slug in slugs.items()]


# -- HTML ---------------------------------------------------------------------

def _compact(iri: Iri, ns: NamespaceTable) -> str:
    hit = ns.compact(iri)
    return f"{hit[0]}:{hit[1]}" if hit and hit[1] else iri.value


def _layout(title: str, body: str, root: str, site_title: str) -> str:
    return (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8">\n'
        f"<title>{escape(title)}</title>\n"
        f'<link rel="stylesheet" href="{root}assets/style.css">\n'
        "</head>\n<body>\n"
        f'<nav><a href="{root}index.html">{escape(site_title)}</a> · '
        f'<a href="{root}stats.html">Statistics</a></nav>\n'
        f"<main>\n{body}</main>\n</body>\n</html>\n"
    )


def _render_term(term: Term, cfg: SiteConfig, slugs: dict[Iri, str]) -> str:
    if isinstance(term, Literal):
        text = f'<span class="literal">{escape(term.lexical)}</span>'
        if term.lang:
            text += f'<span class="lang">@{escape(term.lang)}</span>'
        elif term.datatype is not None:
            text += f'<span class="datatype">^^{escape(_compact(term.datatype, cfg.namespaces))}</span>'
        return text
    if isinstance(term, Iri):
        shown = escape(_compact(term, cfg.namespaces))
        if term in slugs:
            return f'<a class="internal" href="{escape(slugs[term])}.html">{shown}</a>'
        if cfg.is_internal(term):
            # internal IRI without its own description: nothing to link to
            return f'<span class="iri">{shown}</span>'
        return f'<a class="external" href="{escape(term.value)}">{shown}</a>'
    return f'<span class="bnode">{escape(str(term))}</span>'


def render_entity_page(e: EntityPage, g: Graph, cfg: SiteConfig,
                       slugs: Optional[dict[Iri, str]] = None) -> str:
    if slugs is None:
        slugs = assign_slugs(internal_subjects(g, cfg), cfg)
    ns = cfg.namespaces
    parts = [f"<h1>{escape(e.label)}</h1>\n",
             f'<p class="subject-iri"><code>{escape(e.subject.value)}</code></p>\n']
    if e.classes:
        types = ", ".join(_render_term(c, cfg, slugs) for c in e.classes)
        parts.append(f'<p class="types">Types: {types}</p>\n')
    downloads = " ".join(
        f'<a href="{escape(e.slug)}{EXTENSIONS[f]}">{EXTENSIONS[f][1:]}</a>' for f in FORMATS)
    parts.append(f'<p class="downloads">Data: {downloads}</p>\n')
    parts.append('<h2>Properties</h2>\n<table class="outbound">\n')
    for p, o in e.outbound:
        parts.append(f'<tr><th title="{escape(p.value)}">{escape(_compact(p, ns))}</th>'
                     f"<td>{_render_term(o, cfg, slugs)}</td></tr>\n")
    parts.append("</table>\n<h2>Referenced by</h2>\n")
    if e.inbound:
        parts.append('<table class="inbound">\n')
        for s, p in e.inbound:
            parts.append(f"<tr><td>{_render_term(s, cfg, slugs)}</td>"
                         f'<th title="{escape(p.value)}">{escape(_compact(p, ns))}</th></tr>\n')
        parts.append("</table>\n")
    else:
        parts.append('<p class="inbound empty">No incoming references.</p>\n')
    return _layout(e.label, "".join(parts), "../", cfg.site_title)


BAR_WIDTH = 400
BAR_HEIGHT = 18
LABEL_WIDTH = 320


def bar_width(count: int, largest: int) -> int:
    return round(count * BAR_WIDTH / largest) if largest > 0 else 0


def svg_bar_chart(title: str, data: dict[str, int]) -> str:
    largest = max(data.values(), default=0)
    height = max(1, len(data)) * (BAR_HEIGHT + 4) + 4
    width = LABEL_WIDTH + BAR_WIDTH + 80
    rows = []
    for i, (label, value) in enumerate(data.items()):
        y = 4 + i * (BAR_HEIGHT + 4)
        rows.append(
            f'<text x="{LABEL_WIDTH - 6}" y="{y + BAR_HEIGHT - 5}" text-anchor="end">{escape(label)}</text>'
            f'<rect class="bar" x="{LABEL_WIDTH}" y="{y}" width="{bar_width(value, largest)}" '
            f'height="{BAR_HEIGHT}" data-count="{value}"/>'
            f'<text x="{LABEL_WIDTH + bar_width(value, largest) + 4}" y="{y + BAR_HEIGHT - 5}">{value}</text>'
        )
    return (f'<figure>\n<figcaption>{escape(title)}</figcaption>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" class="chart" width="{width}" height="{height}" '
            f'role="img" aria-label="{escape(title)}">' + "".join(rows) + "</svg>\n</figure>\n")


def _compact_keys(data: dict[str, int], ns: NamespaceTable) -> dict[str, int]:
    return {_compact(Iri(k), ns): v for k, v in data.items()}


def render_stats_page(stats: StatsReport, cfg: Optional[SiteConfig] = None) -> str:
    ns = cfg.namespaces if cfg else NamespaceTable()
    title = cfg.site_title if cfg else "Knowledge graph"
    usage = {m: stats.model_usage.get(m, 0) for m in MODEL_PREFIXES}
    usage.update({m: c for m, c in stats.model_usage.items() if m not in usage})
    totals = [
        ("Triples", stats.triple_count),
        ("Entities", stats.entity_count),
        ("Classes", stats.distinct_classes_used),
        ("Properties", stats.distinct_properties_used),
        ("Statements per entity", f"{stats.avg_statements_per_entity:.2f}"),
    ]
    body = ["<h1>Statistics</h1>\n<table class=\"totals\">\n"]
    body += [f'<tr><th>{name}</th><td class="total">{value}</td></tr>\n' for name, value in totals]
    body.append("</table>\n")
    body.append(svg_bar_chart("Model usage", usage))
    body.append(svg_bar_chart("Entities per class", _compact_keys(stats.class_histogram, ns)))
    body.append(svg_bar_chart("Property occurrences", _compact_keys(stats.property_histogram, ns)))
    return _layout(f"{title}: statistics", "".join(body), "", title)


def render_index_page(pages: Sequence[EntityPage], cfg: SiteConfig) -> str:
    ns = cfg.namespaces
    items = []
    for e in pages:
        classes = ", ".join(_compact(c, ns) for c in e.classes)
        items.append(f'<li data-slug="{escape(e.slug)}"><a href="entity/{escape(e.slug)}.html">'
                     f'{escape(e.label)}</a> <span class="classes">{escape(classes)}</span></li>\n')
    body = (f"<h1>{escape(cfg.site_title)}</h1>\n"
            f'<p>{len(pages)} entities.</p>\n'
            '<input id="search" type="search" placeholder="Filter entities" autocomplete="off">\n'
            '<ul id="entities">\n' + "".join(items) + "</ul>\n"
            '<script src="assets/search.js"></script>\n')
    return _layout(cfg.site_title, body, "", cfg.site_title)


def search_index(pages: Sequence[EntityPage], cfg: SiteConfig) -> str:
    entries = [{"slug": e.slug, "label": e.label, "iri": e.subject.value,
                "classes": [_compact(c, cfg.namespaces) for c in e.classes]} for e in pages]
    return json.dumps(entries, indent=1, ensure_ascii=False, sort_keys=True) + "\n"


# -- writing ------------------------------------------------------------------

def _write(root: Path, rel: str, text: str, manifest: list[str]) -> None:
    path = root / rel
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise SiteError(f"cannot write {path}: {exc.strerror or exc}") from exc
    manifest.append(rel)


def emit_conneg_files(e: EntityPage, g: Graph, cfg: SiteConfig,
                      manifest: Optional[list[str]] = None) -> list[Path]:
    """Write the entity's outbound triples in all four formats."""
    manifest = manifest if manifest is not None else []
    written = []
    for fmt in FORMATS:
        rel = f"entity/{e.slug}{EXTENSIONS[fmt]}"
        _write(cfg.output_dir, rel, serialize(e.triples, fmt, cfg.namespaces), manifest)
        written.append(cfg.output_dir / rel)
    return written


def build_site(g: Graph, stats: StatsReport, cfg: SiteConfig) -> list[str]:
    """Write the site under ``cfg.output_dir``; return the sorted list of
    written paths relative to it."""
    root = cfg.output_dir
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SiteError(f"cannot create {root}: {exc.strerror or exc}") from exc
    manifest: list[str] = []
    pages = entity_pages(g, cfg)
    slugs = {e.subject: e.slug for e in pages}
    _write(root, "index.html", render_index_page(pages, cfg), manifest)
    _write(root, "stats.html", render_stats_page(stats, cfg), manifest)
    _write(root, "search-index.json", search_index(pages, cfg), manifest)
    assets = resources.files(__package__) / "assets"
    for name in ASSETS:
        _write(root, f"assets/{name}", (assets / name).read_text(encoding="utf-8"), manifest)
    for e in pages:
        _write(root, f"entity/{e.slug}.html", render_entity_page(e, g, cfg, slugs), manifest)
        emit_conneg_files(e, g, cfg, manifest)
    return sorted(manifest)


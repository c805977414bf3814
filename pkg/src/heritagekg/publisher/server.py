"""Threaded HTTP service: query endpoint, negotiated entity descriptions and
statistics. Everything served is computed from one immutable graph."""
from __future__ import annotations

import json
import logging
import threading
from html import escape
from importlib import resources
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, quote, unquote, urlsplit

from ..chad.stats import StatsReport
from ..query import QuerySyntaxError, evaluate, parse_query
from ..rdf import EXTENSIONS, FORMATS, MEDIA_TYPES, Graph, serialize
from .site import (ASSETS, EntityPage, SiteConfig, _layout, entity_pages, render_entity_page,
                   render_stats_page)

log = logging.getLogger(__name__)

HTML = "text/html"
SPARQL_JSON = "application/sparql-results+json"
# server preference order for Accept ties
OFFERED = (HTML, *(MEDIA_TYPES[f] for f in FORMATS))
FORMAT_BY_MEDIA = {MEDIA_TYPES[f]: f for f in FORMATS}
FORMAT_BY_EXT = {EXTENSIONS[f][1:]: f for f in FORMATS}


def _parse_accept(header: str) -> list[tuple[str, float]]:
    ranges = []
    for part in header.split(","):
        fields = [f.strip() for f in part.split(";")]
        media = fields[0].lower()
        if not media:
            continue
        q = 1.0
        for param in fields[1:]:
            name, _, value = param.partition("=")
            if name.strip().lower() == "q":
                try:
                    q = min(1.0, max(0.0, float(value)))
                except ValueError:
                    q = 0.0
        ranges.append((media, q))
    return ranges


def _specificity(media_range: str, offered: str) -> int:
    if media_range == offered:
        return 3
    kind, _, sub = media_range.partition("/")
    if sub == "*" and offered.startswith(kind + "/"):
        return 2
    if media_range == "*/*":
        return 1
    return 0


def negotiate(accept: Optional[str], offered=OFFERED) -> Optional[str]:
    """Pick the offered media type with the highest q; the most specific
    matching range decides each type's q. No header means the first offer."""
    if not accept or not accept.strip():
        return offered[0]
    ranges = _parse_accept(accept)
    best, best_q = None, 0.0
    for media in offered:
        score, q = 0, 0.0
        for media_range, range_q in ranges:
            s = _specificity(media_range, media)
            if s > score:
                score, q = s, range_q
        if score and q > best_q:
            best, best_q = media, q
    return best


class KnowledgeGraphServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, g: Graph, stats: StatsReport, cfg: SiteConfig):
        self.graph = g
        self.stats = stats
        self.cfg = cfg
        self.pages: dict[str, EntityPage] = {e.slug: e for e in entity_pages(g, cfg)}
        self.slugs = {e.subject: e.slug for e in self.pages.values()}
        super().__init__(address, _Handler)


class _Handler(BaseHTTPRequestHandler):
    server: KnowledgeGraphServer
    server_version = "heritagekg"

    def log_message(self, fmt, *args):
        log.info("%s - %s", self.address_string(), fmt % args)

    def send(self, status: int, body: str, content_type: str, extra: Optional[dict] = None) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", f"{content_type}; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        for k, v in (extra or {}).items():
            self.send_header(k, v)
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(data)

    def send_json(self, status: int, payload, content_type: str = "application/json") -> None:
        self.send(status, json.dumps(payload, indent=2, ensure_ascii=False) + "\n", content_type)

    def do_HEAD(self):
        self.do_GET()

    def do_GET(self):
        url = urlsplit(self.path)
        path = url.path
        if path in ("/", "/index.html"):
            return self.send(HTTPStatus.OK, self.query_page(), HTML)
        if path == "/sparql":
            query = parse_qs(url.query).get("query")
            return self.answer(query[0] if query else None)
        if path == "/stats":
            return self.send_json(HTTPStatus.OK, self.server.stats.to_dict())
        if path == "/stats.html":
            return self.send(HTTPStatus.OK, render_stats_page(self.server.stats, self.server.cfg), HTML)
        if path.startswith("/assets/") and path[len("/assets/"):] in ASSETS:
            name = path[len("/assets/"):]
            ctype = "text/css" if name.endswith(".css") else "text/javascript"
            text = (resources.files(__package__) / "assets" / name).read_text(encoding="utf-8")
            return self.send(HTTPStatus.OK, text, ctype)
        if path.startswith("/entity/"):
            return self.entity(unquote(path[len("/entity/"):]))
        self.send_json(HTTPStatus.NOT_FOUND, {"error": f"no resource at {path}"})

    def do_POST(self):
        url = urlsplit(self.path)
        if url.path != "/sparql":
            return self.send_json(HTTPStatus.NOT_FOUND, {"error": f"no resource at {url.path}"})
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length).decode("utf-8", errors="replace")
        ctype = (self.headers.get("Content-Type") or "").split(";")[0].strip().lower()
        if ctype == "application/sparql-query":
            return self.answer(body)
        query = parse_qs(body).get("query")
        self.answer(query[0] if query else None)

    def answer(self, text: Optional[str]) -> None:
        if not text:
            return self.send_json(HTTPStatus.BAD_REQUEST, {"error": "missing 'query' parameter"})
        try:
            q = parse_query(text)
        except QuerySyntaxError as exc:
            return self.send_json(HTTPStatus.BAD_REQUEST, {
                "error": exc.reason, "position": exc.position,
                "line": exc.line, "column": exc.column})
        self.send_json(HTTPStatus.OK, evaluate(q, self.server.graph).to_sparql_json(), SPARQL_JSON)

    def entity(self, name: str) -> None:
        slug, _, ext = name.partition(".")
        page = self.server.pages.get(slug)
        if page is None or (ext and ext not in FORMAT_BY_EXT and ext != "html"):
            return self.send_json(HTTPStatus.NOT_FOUND, {"error": f"unknown entity {name!r}"})
        if ext:
            media = HTML if ext == "html" else MEDIA_TYPES[FORMAT_BY_EXT[ext]]
        else:
            media = negotiate(self.headers.get("Accept"))
        if media is None:
            return self.send_json(HTTPStatus.NOT_ACCEPTABLE, {
                "error": "no acceptable representation", "available": list(OFFERED)})
        cfg = self.server.cfg
        if media == HTML:
            body = render_entity_page(page, self.server.graph, cfg, self.server.slugs)
        else:
            body = serialize(page.triples, FORMAT_BY_MEDIA[media], cfg.namespaces)
        self.send(HTTPStatus.OK, body, media, {"Vary": "Accept"})

    def query_page(self) -> str:
        cfg = self.server.cfg
        examples = "".join(
            f'<li><a href="/sparql?query={escape(quote(q, safe=""))}">{escape(title)}</a>'
            f"<pre>{escape(q)}</pre></li>\n" for title, q in cfg.example_queries)
        body = ("<h1>Query</h1>\n"
                '<form action="/sparql" method="get">\n'
                '<textarea name="query" rows="10">SELECT * WHERE { ?s ?p ?o . } LIMIT 10</textarea>\n'
                '<button type="submit">Run</button>\n</form>\n'
                f"<h2>Examples</h2>\n<ul>\n{examples}</ul>\n")
        return _layout(f"{cfg.site_title}: query", body, "/", cfg.site_title)


def make_server(g: Graph, stats: StatsReport, cfg: SiteConfig, port: int = 8000,
                host: str = "127.0.0.1") -> KnowledgeGraphServer:
    return KnowledgeGraphServer((host, port), g, stats, cfg)


def serve(g: Graph, stats: StatsReport, cfg: SiteConfig, port: int = 8000,
          host: str = "127.0.0.1", ready: Optional[threading.Event] = None) -> None:
    """Serve until interrupted."""
    httpd = make_server(g, stats, cfg, port, host)
    log.warning("serving on http://%s:%d/", host, httpd.server_address[1])
    if ready is not None:
        ready.set()
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()

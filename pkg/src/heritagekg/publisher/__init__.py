"""Static site publishing and the HTTP query and entity service."""
from .server import make_server, negotiate, serve
from .site import (EntityPage, SiteConfig, SiteError, assign_slugs, build_entity_page,
                   build_site, emit_conneg_files, entity_pages, render_entity_page,
                   render_stats_page)

__all__ = [
    "EntityPage", "SiteConfig", "SiteError", "assign_slugs", "build_entity_page", "build_site",
    "emit_conneg_files", "entity_pages", "make_server", "negotiate", "render_entity_page",
    "render_stats_page", "serve",
]

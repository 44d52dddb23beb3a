"""bimnav: building-model ingestion, semantic goal search and guided navigation.

The package turns an IFC subset or a JSON manifest into searchable
entities, aligns device poses to the building frame, plans walkable
routes, and drives a virtual guide that users follow; a FastAPI service
exposes the whole pipeline over HTTP.
"""

__version__ = "0.1.0"

"""Hit-and-run sampling of bipartite density matrices."""

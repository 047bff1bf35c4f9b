"""Linear network coding on layered networks."""

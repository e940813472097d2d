class InfeasibleError(Exception):
    """A structurally impossible configuration (negative phase duration,
    repetition layout exceeding the block, rate outside the supported
    range).  Distinct from plain input validation errors so the CLI can
    map it to its own exit status."""

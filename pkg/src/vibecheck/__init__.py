"""Deterministic measurement toolkit for studies of AI-assisted programming.

Subpackages and modules:

- ``codemetrics``: VCPLang parsing, control-flow graphs, complexity metrics
- ``sdt``: signal-detection scoring of trap reviews
- ``trapforge``: seeded defect injection and review-corpus generation
- ``retention``: session-log velocities, complexity weighting, decay fits
- ``explainability``: concept coverage and explanation-entropy gap
- ``composite``: utility scores, break-even analysis, zone classification
- ``stats``: power analysis, rank correlation, agreement, mixed models
- ``cli``: the ``vcp`` command-line front end
"""

__version__ = "0.1.0"

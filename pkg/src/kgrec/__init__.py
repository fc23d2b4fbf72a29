"""Knowledge-graph-driven paper recommendation.

Candidate papers are split into two abstract halves, embedded with a
PV-DM paragraph-vector model, weighted by a Naive Bayes sentiment score,
and ranked in two rounds against technology descriptions composed from a
knowledge graph.
"""

__version__ = "0.1.0"

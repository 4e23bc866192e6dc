"""Time-dependent mediation analysis for survival data: graphical
separation machinery, exact discrete causal models, Cox-based effect
estimation, and the linear Hawkes continuous-time example."""

__version__ = "0.1.0"

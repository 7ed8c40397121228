"""Typed translations of lambda-mu into the pi-calculus with explicit fusions.

Subpackages and modules:

    lampi.pi         processes, structural congruence, transitions, bisimilarity
    lampi.lla        linear logic with arities: formulas, sequents, derivation checker
    lampi.lam_mu     typed lambda-mu terms, sigma-equivalence, head linear reduction
    lampi.translate  modal translations of types, terms and derivations
    lampi.machines   call-by-name and call-by-value abstract machines
    lampi.verify     lockstep correspondence, determinism and deadlock probes
    lampi.cli        the ``lampi`` command line
"""

from lampi import lam_mu, lla, machines, pi, translate, verify

__version__ = "0.1.0"
__all__ = ["lam_mu", "lla", "machines", "pi", "translate", "verify"]

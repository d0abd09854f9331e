# src/models/coherence_report.py
from dataclasses import dataclass, field

import pandas as pd


@dataclass
class CoherenceReport:
    """Coherence measures of one normalized dictionary, keyed by their parameters."""

    mu: float
    mu1: dict[int, float] = field(default_factory=dict)
    zeta_km: dict[tuple[int, int], float] = field(default_factory=dict)
    nu_km: dict[tuple[int, int], float] = field(default_factory=dict)
    zeta_p: dict[int, float] = field(default_factory=dict)
    nu_p: dict[int, float] = field(default_factory=dict)
    cnpi: dict[tuple[int, int, int], float] = field(default_factory=dict)
    cnpa: dict[tuple[int, int, int], float] = field(default_factory=dict)
    erc_baseline: dict[tuple[int, int], float] = field(default_factory=dict)

    def __repr__(self):
        return (
            f"CoherenceReport(mu={self.mu:.6g}, mu1={len(self.mu1)}, "
            f"km={len(self.zeta_km)}, p={len(self.zeta_p)}, s={len(self.cnpi)})"
        )

    def to_frame(self) -> pd.DataFrame:
        """Long format with columns measure,k,m,s,p,value (missing keys left empty)."""
        rows = [{"measure": "mu", "value": self.mu}]
        rows += [{"measure": "mu1", "k": k, "value": v} for k, v in self.mu1.items()]
        rows += [{"measure": "npi", "k": k, "m": m, "value": v} for (k, m), v in self.zeta_km.items()]
        rows += [{"measure": "npa", "k": k, "m": m, "value": v} for (k, m), v in self.nu_km.items()]
        rows += [{"measure": "zeta_p", "p": p, "value": v} for p, v in self.zeta_p.items()]
        rows += [{"measure": "nu_p", "p": p, "value": v} for p, v in self.nu_p.items()]
        rows += [
            {"measure": "cnpi", "k": k, "m": m, "s": s, "value": v}
            for (k, m, s), v in self.cnpi.items()
        ]
        rows += [
            {"measure": "cnpa", "k": k, "m": m, "s": s, "value": v}
            for (k, m, s), v in self.cnpa.items()
        ]
        rows += [
            {"measure": "erc", "k": k, "m": m, "value": v}
            for (k, m), v in self.erc_baseline.items()
        ]

        df = pd.DataFrame(rows, columns=["measure", "k", "m", "s", "p", "value"])
        for col in ["k", "m", "s", "p"]:
            df[col] = df[col].astype("Int64")
        return df

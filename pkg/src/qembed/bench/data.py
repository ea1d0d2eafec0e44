"""Synthetic churn table with the same column layout as the public CSV.

Used as the bundled fallback so the full benchmark matrix runs out of the
box.  Rows are drawn from a seeded generator; the label depends on contract
type, internet service and tenure so every model has signal to find, and
TotalCharges tracks tenure * MonthlyCharges closely enough to trip the
correlation pruning stage just like the real data does.
"""
from __future__ import annotations

import numpy as np

from ..pipeline import Dataset
from .config import TELCO_SCHEMA

_CONTRACTS = ("Month-to-month", "One year", "Two year")
_INTERNET = ("DSL", "Fiber optic", "No")
_PAYMENTS = (
    "Electronic check",
    "Mailed check",
    "Bank transfer (automatic)",
    "Credit card (automatic)",
)
_ADDONS = (
    "OnlineSecurity",
    "OnlineBackup",
    "DeviceProtection",
    "TechSupport",
    "StreamingTV",
    "StreamingMovies",
)


def _yes_no(rng, n, p_yes):
    return np.where(rng.random(n) < p_yes, "Yes", "No")


def synthetic_telco(n_rows: int = 500, seed: int = 0) -> Dataset:
    """Generate a seeded churn dataset matching the 21-column layout."""
    rng = np.random.default_rng(seed)
    n = int(n_rows)

    tenure = rng.integers(0, 73, size=n)
    # mild tenure coupling puts corr(tenure, TotalCharges) near 0.83,
    # comfortably past the default 0.8 pruning threshold
    monthly = np.clip(
        np.round(20.0 + 0.12 * tenure + rng.uniform(0.0, 75.7, size=n), 2),
        18.0,
        118.0,
    )
    total = np.round(tenure * monthly * rng.uniform(0.88, 1.12, size=n), 2)

    contract = rng.choice(_CONTRACTS, size=n, p=[0.55, 0.21, 0.24])
    internet = rng.choice(_INTERNET, size=n, p=[0.34, 0.44, 0.22])
    phone = _yes_no(rng, n, 0.90)

    # fresh accounts have no charges yet; matches the blank-cell coercion rule
    total = np.where(tenure == 0, 0.0, total)

    columns: dict[str, object] = {}
    columns["customerID"] = tuple(f"C{i:05d}" for i in range(n))
    columns["gender"] = tuple(rng.choice(("Female", "Male"), size=n))
    columns["SeniorCitizen"] = rng.integers(0, 2, size=n).astype(float)
    columns["Partner"] = tuple(_yes_no(rng, n, 0.48))
    columns["Dependents"] = tuple(_yes_no(rng, n, 0.30))
    columns["tenure"] = tenure.astype(float)
    columns["PhoneService"] = tuple(phone)
    columns["MultipleLines"] = tuple(
        "No phone service" if p == "No" else m
        for p, m in zip(phone, _yes_no(rng, n, 0.46))
    )
    columns["InternetService"] = tuple(internet)
    for addon in _ADDONS:
        columns[addon] = tuple(
            "No internet service" if s == "No" else v
            for s, v in zip(internet, _yes_no(rng, n, 0.42))
        )
    columns["Contract"] = tuple(contract)
    columns["PaperlessBilling"] = tuple(_yes_no(rng, n, 0.59))
    columns["PaymentMethod"] = tuple(rng.choice(_PAYMENTS, size=n))
    columns["MonthlyCharges"] = monthly
    columns["TotalCharges"] = total

    logit = (
        -1.1
        + 1.3 * (contract == "Month-to-month")
        + 0.9 * (internet == "Fiber optic")
        - 0.035 * tenure
        + rng.normal(0.0, 0.6, size=n)
    )
    churn = 1.0 / (1.0 + np.exp(-logit)) > rng.random(n)
    columns["Churn"] = tuple("Yes" if c else "No" for c in churn)

    blank_counts = {"TotalCharges": int(np.count_nonzero(tenure == 0))}
    return Dataset(
        schema=TELCO_SCHEMA,
        columns=columns,
        n_rows=n,
        blank_counts=blank_counts,
    )

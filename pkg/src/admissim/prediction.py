"""Simulated LOS predictor: perturb true values with a configurable error.

A predictor of bias mu and spread sigma is emulated by drawing
eps ~ N(mu, sigma^2) (or a degenerate/triangular/Cauchy variant) and
returning round(true + eps) clamped to >= 1.  sigma = 0 collapses every
distribution to the shifted point mass, the perfect-oracle limit.

Each patient gets one named random stream keyed by
(master seed, instance, mu, sigma, repetition, patient) so that every
policy faces the same error realizations, and adding scenarios never
perturbs existing ones.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

DISTRIBUTIONS = ("normal", "dirac", "triangular", "cauchy")


@dataclass(frozen=True)
class ErrorModel:
    mean: float
    std_dev: float
    distribution: str = "normal"

    def __post_init__(self):
        if self.std_dev < 0:
            raise ValueError("std_dev must be >= 0")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not (math.isfinite(self.mean) and math.isfinite(self.std_dev)):
            raise ValueError("error model parameters must be finite")


def draw_error(model: ErrorModel, rng: np.random.Generator) -> float:
    if model.std_dev == 0 or model.distribution == "dirac":
        return model.mean
    if model.distribution == "normal":
        return rng.normal(model.mean, model.std_dev)
    if model.distribution == "triangular":
        # symmetric triangular with matching std dev: half-width sigma*sqrt(6)
        half = model.std_dev * math.sqrt(6.0)
        return rng.triangular(model.mean - half, model.mean, model.mean + half)
    # cauchy: scale parameter taken as sigma; heavy tails, kept as a hook
    return model.mean + model.std_dev * rng.standard_cauchy()


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def simulate_predicted_los(true_los: int, model: ErrorModel,
                           rng: np.random.Generator) -> int:
    """One predicted LOS value, integer days >= 1."""
    if true_los < 1:
        raise ValueError("true LOS must be >= 1")
    eps = draw_error(model, rng)
    return max(1, round_half_away(true_los + eps))


@dataclass(frozen=True)
class PredictionSeeds:
    """Identifies the error-realization stream family for one run.

    Deliberately excludes the policy so paired runs across policies see
    identical predictions patient by patient.
    """
    master_seed: int
    instance_id: str
    mu: float
    sigma: float
    repetition: int

    def stream(self, patient_id: int) -> np.random.Generator:
        tag = (f"{self.master_seed}|{self.instance_id}|{self.mu:g}|"
               f"{self.sigma:g}|{self.repetition}|{patient_id}")
        digest = hashlib.sha256(tag.encode()).digest()
        seed = int.from_bytes(digest[:8], "little")
        return np.random.Generator(np.random.PCG64(seed))


def predict_for_patient(true_los: int, model: ErrorModel,
                        seeds: PredictionSeeds, patient_id: int) -> int:
    """The frozen prediction for one patient (single draw per stream)."""
    return simulate_predicted_los(true_los, model, seeds.stream(patient_id))

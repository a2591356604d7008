# algorithms/types.py
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from django.core.exceptions import ValidationError

from solutions.types import SeedSet


@dataclass(frozen=True)
class GreedyTrace:
    """
    Seeds in the order greedy picked them with their marginal gains

    `initial` holds seeds fixed before the run (not part of `seeds`);
    `values[i]` is the objective after the first i picks.
    """

    seeds: tuple
    gains: tuple
    values: tuple
    initial: tuple = ()

    def __len__(self):
        return len(self.seeds)

    def prefix(self, i):
        """T_i: the first i picks (the whole run when i exceeds its length)"""
        if i < 0:
            raise ValidationError("Prefix length cannot be negative.", code='argument')
        return self.initial + self.seeds[:i]

    def prefixes(self, upto=None):
        upto = len(self.seeds) if upto is None else upto
        return [self.prefix(i) for i in range(upto + 1)]

    def seed_set(self, k=None):
        nodes = self.initial + self.seeds
        return SeedSet(nodes, len(nodes) if k is None else max(k, len(nodes)))

    @property
    def value(self):
        return self.values[-1]


ETA_PRESETS = {
    'ind_lp': ('0', '1/4', '1/3', '1/2'),
    'distribution': ('0', 'x/16', 'x/8', 'x/4'),
}


@dataclass(frozen=True)
class EtaRelaxation:
    """
    Additive slack on the demographic-parity constraints

    `label` keeps the preset text ('0', '1/4', 'x/8', ...); presets relative
    to x are resolved with `resolve` once grdy_im's violation is known.
    """

    eta: float
    label: str = ''

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValidationError(f"eta must lie in [0, 1], got {self.eta}.", code='range')
        if not self.label:
            object.__setattr__(self, 'label', f"{self.eta:g}")

    @staticmethod
    def is_relative(label):
        return str(label).strip().startswith('x')

    @classmethod
    def parse(cls, label, reference=None):
        """
        Build from a preset such as '0', '0.25', '1/3' or 'x/16'

        Args:
            label: the preset text or a number
            reference: grdy_im's additive violation, required for 'x/...' presets
        """
        text = str(label).strip()
        if cls.is_relative(text):
            if reference is None:
                raise ValidationError(f"Preset {text!r} needs the grdy_im violation.", code='argument')
            divisor = text[1:].lstrip('/').strip() or '1'
            try:
                value = float(reference) / float(Fraction(divisor))
            except (ValueError, ZeroDivisionError):
                raise ValidationError(f"Invalid eta preset {text!r}.", code='argument')
        else:
            try:
                value = float(Fraction(text))
            except (ValueError, ZeroDivisionError):
                raise ValidationError(f"Invalid eta preset {text!r}.", code='argument')
        return cls(value, text)

"""Preferences component - lazy Impartial Culture preference orders."""
from .preference_source import PreferenceSource, ProfileSource, reveal_next, reveal_next_in, full_profile

__all__ = [
    "PreferenceSource",
    "ProfileSource",
    "reveal_next",
    "reveal_next_in",
    "full_profile",
]

"""Periodic table symbols and a greedy composition tokenizer."""
from __future__ import annotations

ELEMENT_SYMBOLS: tuple[str, ...] = (
    "H", "He",
    "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar",
    "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr",
    "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe",
    "Cs", "Ba",
    "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er",
    "Tm", "Yb", "Lu",
    "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn",
    "Fr", "Ra",
    "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm",
    "Md", "No", "Lr",
    "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc",
    "Lv", "Ts", "Og",
)

ELEMENTS = frozenset(ELEMENT_SYMBOLS)


def tokenize_composition(composition: str) -> tuple[list[str], list[str]]:
    """Split a composition string into element symbols.

    Returns ``(symbols, warnings)``. Symbols are listed in order of
    appearance (with repeats); ``warnings`` lists letter runs that could not
    be read as element symbols, e.g. ``"x"`` in ``"FexS"`` or ``"δ"``.
    Digits, punctuation and whitespace are skipped silently.
    """
    symbols: list[str] = []
    warnings: list[str] = []
    stray: list[str] = []

    def flush() -> None:
        if stray:
            warnings.append("".join(stray))
            stray.clear()

    i, n = 0, len(composition)
    while i < n:
        ch = composition[i]
        if ch.isascii() and ch.isupper():
            pair = composition[i : i + 2]
            if len(pair) == 2 and pair[1].isascii() and pair[1].islower() and pair in ELEMENTS:
                flush()
                symbols.append(pair)
                i += 2
                continue
            if ch in ELEMENTS:
                flush()
                symbols.append(ch)
                i += 1
                continue
            stray.append(ch)
        elif ch.isalpha():
            stray.append(ch)
        else:
            flush()
        i += 1
    flush()
    return symbols, warnings


def parse_composition(composition: str) -> set[str]:
    """Return the set of element symbols present in ``composition``."""
    symbols, _ = tokenize_composition(composition)
    return set(symbols)

"""Free words over a named generator alphabet.

Words are plain letter sequences: concatenation never reduces, so the letter
count of a constructed word is exactly the certified length bound it was
built to meet.  Free reduction is an explicit operation, and reported
lengths of reduced words upper-bound the (uncomputable) true word length.
"""

from __future__ import annotations

from typing import NamedTuple


class Letter(NamedTuple):
    gen: str
    exp: int


class UnboundGeneratorError(KeyError):
    """A word uses a generator name the assignment does not bind."""


class Word:
    """Sequence of signed generator letters; product order, rightmost applied first."""

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        checked = []
        for item in letters:
            gen, exp = item
            if exp not in (1, -1):
                raise ValueError(f"letter exponent must be +1 or -1, got {exp}")
            checked.append(Letter(str(gen), int(exp)))
        self.letters = tuple(checked)

    @classmethod
    def _make(cls, letters: tuple) -> "Word":
        w = cls.__new__(cls)
        w.letters = letters
        return w

    @classmethod
    def gen(cls, name: str, exp: int = 1) -> "Word":
        return cls([(name, exp)])

    @classmethod
    def run(cls, name: str, count: int, exp: int = 1) -> "Word":
        """count repetitions of one signed letter."""
        return cls([(name, exp)] * count)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word._make(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word._make(tuple(Letter(g, -e) for g, e in reversed(self.letters)))

    def power(self, k: int) -> "Word":
        if k < 0:
            return self.inverse().power(-k)
        return Word._make(self.letters * k)

    def reduce(self) -> "Word":
        """Freely reduced form (cancel adjacent g g^-1 pairs)."""
        stack: list[Letter] = []
        for letter in self.letters:
            if stack and stack[-1].gen == letter.gen and stack[-1].exp == -letter.exp:
                stack.pop()
            else:
                stack.append(letter)
        return Word._make(tuple(stack))

    def is_reduced(self) -> bool:
        return len(self.reduce()) == len(self)

    def rename(self, fn) -> "Word":
        return Word._make(tuple(Letter(fn(g), e) for g, e in self.letters))

    def namespaced(self, prefix: str) -> "Word":
        return self.rename(lambda g: f"{prefix}:{g}")

    def names(self) -> set[str]:
        return {g for g, _ in self.letters}

    def to_obj(self) -> list[dict]:
        return [{"gen": g, "exp": e} for g, e in self.letters]

    @classmethod
    def from_obj(cls, obj) -> "Word":
        return cls([(item["gen"], item["exp"]) for item in obj])

    def __repr__(self):
        if not self.letters:
            return "Word()"
        body = " ".join(g if e == 1 else f"{g}^-1" for g, e in self.letters)
        return f"Word({body})"


def commutator(u: Word, v: Word) -> Word:
    """reduce(u v u^-1 v^-1)."""
    return (u * v * u.inverse() * v.inverse()).reduce()


class Assignment:
    """Binding of generator names to invertible maps (anything with apply/apply_inverse)."""

    def __init__(self, maps: dict):
        dims = {m.dim for m in maps.values() if hasattr(m, "dim")}
        if len(dims) > 1:
            raise ValueError(f"assignment mixes dimensions {sorted(dims)}")
        self.maps = dict(maps)

    def __getitem__(self, name):
        try:
            return self.maps[name]
        except KeyError:
            raise UnboundGeneratorError(name) from None

    def __contains__(self, name):
        return name in self.maps

    def names(self):
        return set(self.maps)

    def merged(self, other: "Assignment") -> "Assignment":
        clash = self.names() & other.names()
        if clash:
            raise ValueError(f"generator names collide: {sorted(clash)}")
        return Assignment({**self.maps, **other.maps})

    def namespaced(self, prefix: str, wrap=None) -> "Assignment":
        wrap = wrap or (lambda m: m)
        return Assignment({f"{prefix}:{k}": wrap(m) for k, m in self.maps.items()})


def evaluate_word(word: Word, assignment: Assignment, pts):
    """Apply the word to points, rightmost letter first; inverse letters use apply_inverse."""
    for gen, exp in reversed(word.letters):
        m = assignment[gen]
        pts = m.apply(pts) if exp == 1 else m.apply_inverse(pts)
    return pts


def length_ratio_table(rows):
    """(p, word) pairs -> (p, reduced length, length/p) rows.

    The ratios upper-bound word-length growth per power: they are witnesses,
    not geodesic lengths.
    """
    out = []
    prev = None
    for p, word in rows:
        p = int(p)
        if prev is not None and p <= prev:
            raise ValueError("powers must increase strictly")
        prev = p
        n_letters = len(word.reduce())
        out.append((p, n_letters, n_letters / p))
    return out

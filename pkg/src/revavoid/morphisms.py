"""Uniform morphisms and the concrete morphisms used in the checks."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from .words import LETTERS, Alphabet, alphabet_of


@dataclass(frozen=True)
class UniformMorphism:
    source_alphabet: Alphabet
    target_alphabet: Alphabet
    images: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.source_alphabet.size:
            raise ValueError(
                f"need one image per source letter: {self.source_alphabet.size} letters, {len(self.images)} images"
            )
        widths = {len(img) for img in self.images}
        if len(widths) != 1 or 0 in widths:
            raise ValueError(f"images must share one nonzero length, got lengths {sorted(widths)}")
        for img in self.images:
            self.target_alphabet.check(img)

    @classmethod
    def from_images(cls, images: Sequence[str], target_size: int = None) -> "UniformMorphism":
        target = Alphabet(target_size) if target_size else alphabet_of("".join(images))
        return cls(Alphabet(len(images)), target, tuple(images))

    @property
    def width(self) -> int:
        return len(self.images[0])

    def image(self, letter: Union[int, str]) -> str:
        if isinstance(letter, str):
            letter = LETTERS.index(letter)
        return self.images[letter]

    def __call__(self, w: str) -> str:
        return apply(self, w)

    def to_text(self) -> str:
        return "".join(f"{LETTERS[i]} -> {img}\n" for i, img in enumerate(self.images))


def apply(m: UniformMorphism, w: str) -> str:
    table = dict(zip(m.source_alphabet.letters, m.images))
    try:
        return "".join([table[c] for c in w])
    except KeyError as e:
        raise ValueError(f"letter {e.args[0]!r} is outside the source alphabet of size {m.source_alphabet.size}") from None


def identity(size: int) -> UniformMorphism:
    return UniformMorphism(Alphabet(size), Alphabet(size), tuple(LETTERS[:size]))


def paper_morphism_21() -> UniformMorphism:
    """21-uniform morphism from 4 letters to binary words."""
    return UniformMorphism(
        Alphabet(4),
        Alphabet(2),
        (
            "000010111000111100111",
            "000010110011011110011",
            "000010110001111010011",
            "000010110001001101111",
        ),
    )


def paper_morphism_9() -> UniformMorphism:
    """9-uniform morphism from 4 letters to ternary words."""
    return UniformMorphism(
        Alphabet(4),
        Alphabet(3),
        (
            "011122202",
            "010121202",
            "001112122",
            "000101120",
        ),
    )


def psi_morphism(k: int) -> UniformMorphism:
    """(k+3)-uniform morphism from 3 to 5 letters, built for k = 3t + i with 0 <= i <= 2."""
    if k < 3:
        raise ValueError(f"psi_morphism needs k >= 3, got {k}")
    i = k % 3
    t = (k - i) // 3
    templates = (("012", "0123"), ("013", "0134"), ("014", "0142"))
    images = tuple(short * (t + 1 - i) + long * i for short, long in templates)
    return UniformMorphism(Alphabet(3), Alphabet(5), images)


def parse_morphism(text: str) -> UniformMorphism:
    """Read lines ``<letter> -> <image>`` given in source-letter order."""
    images = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        letter, sep, image = (part.strip() for part in line.partition("->"))
        if not sep or len(letter) != 1 or letter not in LETTERS:
            raise ValueError(f"line {lineno}: expected '<letter> -> <image>', got {raw!r}")
        if LETTERS.index(letter) != len(images):
            raise ValueError(f"line {lineno}: expected letter {LETTERS[len(images)]!r}, got {letter!r}")
        images.append(image)
    if not images:
        raise ValueError("morphism file has no images")
    return UniformMorphism.from_images(images)


def load_morphism(path: Union[str, Path]) -> UniformMorphism:
    return parse_morphism(Path(path).read_text())

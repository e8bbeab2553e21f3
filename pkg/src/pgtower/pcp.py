"""Power-commutator presentations of finite p-groups.

Generators are numbered from 0 internally and printed as ``x1 .. xn``.
An element is an exponent tuple ``(e_1, ..., e_n)`` with entries in
``[0, p)`` standing for the normal word ``x_1^e_1 ... x_n^e_n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Element = tuple  # exponent vector
Word = Sequence[tuple[int, int]]  # (0-based generator, integer exponent)


class PresentationError(ValueError):
    """Malformed or inconsistent presentation text or data."""


class CollectionLimitError(RuntimeError):
    pass


COLLECT_STEP_LIMIT = 50_000_000


def relation_order(n: int) -> list[tuple]:
    """Canonical relation order: powers ascending, then commutators ``[x_j, x_i]`` by (j, i)."""
    out: list[tuple] = [("pow", i) for i in range(n)]
    out += [("comm", j, i) for j in range(n) for i in range(j)]
    return out


@dataclass(eq=False)
class PcPresentation:
    """A pc presentation; treat as immutable once built.

    ``power[i]`` is the normal word of ``x_i^p``; ``comm[(j, i)]`` (j > i) is
    the normal word of ``[x_j, x_i]``. Missing keys mean trivial. ``defs``
    maps a generator to the relation key defining it (an exact
    ``x_j^p = x_k`` or ``[x_j, x_i] = x_k``).
    """

    p: int
    n: int
    power: tuple[Element, ...]
    comm: Mapping[tuple[int, int], Element]
    weights: tuple[int, ...] | None = None
    defs: Mapping[int, tuple] | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        n = self.n
        if len(self.power) != n:
            raise PresentationError("power table has wrong length")
        self.power = tuple(tuple(w) for w in self.power)
        self.comm = {k: tuple(v) for k, v in self.comm.items() if any(v)}
        for i, w in enumerate(self.power):
            if len(w) != n or any(w[: i + 1]) or any(not 0 <= x < self.p for x in w):
                raise PresentationError(f"bad power relation for x{i + 1}")
        for (j, i), w in self.comm.items():
            if not 0 <= i < j < n:
                raise PresentationError(f"bad commutator key {(j, i)}")
            if len(w) != n or any(w[: j + 1]) or any(not 0 <= x < self.p for x in w):
                raise PresentationError(f"bad commutator relation [x{j + 1},x{i + 1}]")
        if self.defs is None:
            self.defs = infer_definitions(self)
        if self.weights is not None:
            self.weights = tuple(self.weights)
        # conjugation data: x_k^{x_i} = x_k [x_k, x_i]
        self._nontrivial = [
            frozenset(k for k in range(i + 1, n) if (k, i) in self.comm) for i in range(n)
        ]
        central = []
        for k in range(n):
            central.append(
                not any((k, i) in self.comm for i in range(k))
                and not any((j, k) in self.comm for j in range(k + 1, n))
            )
        self._central = tuple(central)
        self._noncentral = [k for k in range(n) if not central[k]]
        self._power_letters = [_letters(w) for w in self.power]
        self._comm_letters = {k: _letters(v) for k, v in self.comm.items()}

    # -- basics ---------------------------------------------------------------

    @property
    def identity(self) -> Element:
        return (0,) * self.n

    def gen(self, i: int) -> Element:
        e = [0] * self.n
        e[i] = 1
        return tuple(e)

    @property
    def order(self) -> int:
        return self.p**self.n

    @property
    def d(self) -> int:
        """Number of generators without a definition (the minimal generators)."""
        return self.n - len(self.defs)

    def relation_rhs(self, key: tuple) -> Element:
        if key[0] == "pow":
            return self.power[key[1]]
        return self.comm.get((key[1], key[2]), self.identity)

    def key(self) -> tuple:
        return (self.p, self.n, self.power, tuple(sorted(self.comm.items())))

    def same_relations(self, other: "PcPresentation") -> bool:
        return self.key() == other.key()

    def __eq__(self, other):
        if not isinstance(other, PcPresentation):
            return NotImplemented
        # weights are derived data; two presentations with the same relations are equal
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def weights_or_none(self):
        return self.weights

    # -- collection -------------------------------------------------------------

    def _collect(self, e: list[int], stack: list[int]) -> None:
        """Multiply the normal word ``e`` on the right by the letters popped from ``stack``."""
        p = self.p
        n = self.n
        nontriv = self._nontrivial
        central = self._central
        noncentral = self._noncentral
        comm_letters = self._comm_letters
        power_letters = self._power_letters
        steps = 0
        while stack:
            steps += 1
            if steps > COLLECT_STEP_LIMIT:
                raise CollectionLimitError("collection exceeded step bound")
            i = stack.pop()
            nt = nontriv[i]
            conflict = False
            for k in noncentral:
                if k > i and e[k] and k in nt:
                    conflict = True
                    break
            if not conflict:
                # x_i commutes with everything to its right in e, but
                # non-central letters right of i must still be moved when i
                # overflows; only the overflow path needs the general route.
                if e[i] + 1 < p:
                    e[i] += 1
                    continue
                if not any(e[k] for k in noncentral if k > i):
                    e[i] = 0
                    stack.extend(reversed(power_letters[i]))
                    continue
            # general route: pull the non-central part above i off, conjugate by x_i
            seq: list[int] = []
            for k in range(i + 1, n):
                ek = e[k]
                if ek and not central[k]:
                    e[k] = 0
                    cl = comm_letters.get((k, i))
                    if cl is None:
                        seq.extend([k] * ek)
                    else:
                        for _ in range(ek):
                            seq.append(k)
                            seq.extend(cl)
            e[i] += 1
            if e[i] == p:
                e[i] = 0
                seq = list(power_letters[i]) + seq
            stack.extend(reversed(seq))

    def multiply(self, a: Element, b: Element) -> Element:
        e = list(a)
        stack: list[int] = []
        for k in range(self.n - 1, -1, -1):
            stack.extend([k] * b[k])
        self._collect(e, stack)
        return tuple(e)

    def collect(self, word: Word) -> Element:
        """Normal form of a word given as ``(generator, exponent)`` letters."""
        e = list(self.identity)
        for g, x in word:
            if not 0 <= g < self.n:
                raise PresentationError(f"generator index {g + 1} out of range")
            if x >= 0:
                stack = [g] * x
                self._collect(e, stack)
            else:
                inv = self.inverse(self.gen(g))
                for _ in range(-x):
                    e = list(self.multiply(tuple(e), inv))
        return tuple(e)

    def inverse(self, a: Element) -> Element:
        p = self.p
        e = list(a)
        h = [0] * self.n
        for i in range(self.n):
            if e[i]:
                k = p - e[i]
                h[i] = k
                self._collect(e, [i] * k)
        return tuple(h)

    def solve(self, u: Element, v: Element) -> Element:
        """The element ``x`` with ``u x = v``."""
        p = self.p
        e = list(u)
        h = [0] * self.n
        for i in range(self.n):
            k = (v[i] - e[i]) % p
            if k:
                h[i] = k
                self._collect(e, [i] * k)
        return tuple(h)

    def power_of(self, a: Element, k: int) -> Element:
        if k < 0:
            a = self.inverse(a)
            k = -k
        result = self.identity
        base = a
        while k:
            if k & 1:
                result = self.multiply(result, base)
            k >>= 1
            if k:
                base = self.multiply(base, base)
        return result

    def commutator(self, a: Element, b: Element) -> Element:
        """``a^-1 b^-1 a b``."""
        return self.solve(self.multiply(b, a), self.multiply(a, b))

    def conjugate(self, a: Element, b: Element) -> Element:
        """``b^-1 a b``."""
        return self.solve(b, self.multiply(a, b))

    def element_order(self, a: Element) -> int:
        o = 1
        while any(a):
            a = self.power_of(a, self.p)
            o *= self.p
        return o

    def group_order(self) -> int:
        return self.order

    def evaluate(self, images: Sequence[Element], target: "PcPresentation") -> list[Element]:
        """Images in ``target`` of all generators, from images of the minimal ones.

        Definitions are followed in generator order, so ``images`` needs one
        entry per generator without a definition.
        """
        free = [k for k in range(self.n) if k not in self.defs]
        if len(images) != len(free):
            raise PresentationError("need one image per minimal generator")
        out: list[Element | None] = [None] * self.n
        for k, im in zip(free, images):
            out[k] = tuple(im)
        for k in range(self.n):
            if out[k] is not None:
                continue
            d = self.defs[k]
            if d[0] == "pow":
                out[k] = target.power_of(out[d[1]], self.p)
            else:
                out[k] = target.commutator(out[d[1]], out[d[2]])
        return out  # type: ignore[return-value]

    # -- consistency ------------------------------------------------------------

    def consistency_pairs(self):
        """Yield the overlap test pairs as (label, left, right) elements.

        Central generators with trivial power relation cannot break any
        overlap, so they are skipped.
        """
        n = self.n
        p = self.p
        idle = [self._central[k] and not any(self.power[k]) for k in range(n)]
        live = [k for k in range(n) if not idle[k]]
        gen = self.gen
        mul = self.multiply
        for a in range(len(live)):
            for b in range(a):
                for c in range(b):
                    k, j, i = live[a], live[b], live[c]
                    left = mul(mul(gen(k), gen(j)), gen(i))
                    right = mul(gen(k), mul(gen(j), gen(i)))
                    yield (("kji", k, j, i), left, right)
        for a in range(len(live)):
            for b in range(a):
                j, i = live[a], live[b]
                xj_pm1 = tuple((p - 1) if t == j else 0 for t in range(n))
                xi_pm1 = tuple((p - 1) if t == i else 0 for t in range(n))
                left = mul(self.power[j], gen(i))
                right = mul(xj_pm1, mul(gen(j), gen(i)))
                yield (("jjp_i", j, i), left, right)
                left = mul(gen(j), self.power[i])
                right = mul(mul(gen(j), gen(i)), xi_pm1)
                yield (("j_iip", j, i), left, right)
        for i in live:
            yield (("iip", i), mul(self.power[i], gen(i)), mul(gen(i), self.power[i]))

    def is_consistent(self) -> bool:
        if "consistent" not in self._cache:
            self._cache["consistent"] = all(l == r for _, l, r in self.consistency_pairs())
        return self._cache["consistent"]

    # -- structure hooks (lazy) -------------------------------------------------

    @cached_property
    def series_weights(self) -> tuple[int, ...]:
        from .structure import weights_from_series

        return weights_from_series(self)

    def gen_weights(self) -> tuple[int, ...]:
        return self.weights if self.weights is not None else self.series_weights

    @property
    def p_class(self) -> int:
        w = self.gen_weights()
        return max(w) if w else 0

    def with_weights(self) -> "PcPresentation":
        if self.weights is not None:
            return self
        return PcPresentation(self.p, self.n, self.power, self.comm, self.series_weights, self.defs)


def _letters(w: Element) -> tuple[int, ...]:
    out: list[int] = []
    for k, x in enumerate(w):
        out.extend([k] * x)
    return tuple(out)


def infer_definitions(P: PcPresentation) -> dict[int, tuple]:
    """First exact relation (in canonical order) equal to each generator."""
    defs: dict[int, tuple] = {}
    for key in relation_order(P.n):
        rhs = P.relation_rhs(key)
        nz = [k for k, x in enumerate(rhs) if x]
        if len(nz) == 1 and rhs[nz[0]] == 1:
            k = nz[0]
            if k not in defs:
                defs[k] = key
    return defs


# --- text format -------------------------------------------------------------

_GEN = r"x_?\{?(\d+)\}?"
_HEADER = re.compile(r"^\s*(p\s*=\s*\d+(\s+|$)|n\s*=\s*\d+(\s+|$)|d\s*=\s*\d+(\s+|$))+\s*$")


def _eval_exponent(tok: str, params: Mapping[str, int]) -> int:
    tok = tok.strip()
    if tok[:1] in "({" and tok[-1:] in ")}":
        tok = tok[1:-1]
    tok = tok.replace(" ", "")
    if not re.fullmatch(r"[-+]?(\d+|[a-zA-Z]\w*)([-+](\d+|[a-zA-Z]\w*))*", tok):
        raise PresentationError(f"bad exponent {tok!r}")
    total = 0
    for sign, atom in re.findall(r"([-+]?)(\d+|[a-zA-Z]\w*)", tok):
        if atom.isdigit():
            v = int(atom)
        elif atom in params:
            v = int(params[atom])
        else:
            raise PresentationError(f"unbound parameter {atom!r}")
        total += -v if sign == "-" else v
    return total


def _parse_word(text: str, n: int, params: Mapping[str, int]) -> list[tuple[int, int]]:
    text = text.strip()
    if text in ("", "1", "id", "e"):
        return []
    letters = []
    pat = re.compile(r"\s*" + _GEN + r"(\s*\^\s*(\{[^}]*\}|\([^)]*\)|-?\d+|[a-zA-Z]\w*))?")
    pos = 0
    while pos < len(text):
        m = pat.match(text, pos)
        if not m:
            if text[pos:].strip() in ("", "*"):
                break
            if text[pos] in "* ":
                pos += 1
                continue
            raise PresentationError(f"cannot parse word near {text[pos:]!r}")
        g = int(m.group(1))
        if not 1 <= g <= n:
            raise PresentationError(f"generator x{g} not declared (n={n})")
        e = _eval_exponent(m.group(3), params) if m.group(3) else 1
        letters.append((g - 1, e))
        pos = m.end()
        while pos < len(text) and text[pos] in "* \t":
            pos += 1
    return letters


def parse_presentation(
    text: str,
    params: Mapping[str, int] | None = None,
    *,
    n: int | None = None,
    p: int | None = None,
    check: bool = True,
) -> PcPresentation:
    """Parse the linearized presentation notation.

    Statements are separated by ``;`` or newlines; ``#`` starts a comment. A
    header ``p=2 n=11 d=2`` fixes the prime and generator count (``n``/``p``
    keyword arguments may stand in for it). Relations read ``xi^p = word`` or
    ``[xj,xi] = word``; anything not listed is trivial. Exponents may use the
    bound ``params`` (``x11^t``, ``x9^{1-r}``).
    """
    params = dict(params or {})
    stmts = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        stmts.extend(s.strip() for s in line.split(";"))
    stmts = [s for s in stmts if s]
    d_decl = None
    rel_stmts = []
    for s in stmts:
        if "=" in s and _HEADER.match(s):
            for name, val in re.findall(r"([pnd])\s*=\s*(\d+)", s):
                if name == "p":
                    p = int(val)
                elif name == "n":
                    n = int(val)
                else:
                    d_decl = int(val)
        else:
            rel_stmts.append(s)
    if p is None or n is None:
        raise PresentationError("missing header (p=.. n=..)")
    power: list[list[int] | None] = [None] * n
    comm: dict[tuple[int, int], list[tuple[int, int]]] = {}
    pow_words: dict[int, list[tuple[int, int]]] = {}
    for s in rel_stmts:
        if s.count("=") != 1:
            raise PresentationError(f"syntax error in {s!r}")
        lhs, rhs = (t.strip() for t in s.split("="))
        mc = re.fullmatch(r"\[\s*" + _GEN + r"\s*,\s*" + _GEN + r"\s*\]", lhs)
        mp = re.fullmatch(_GEN + r"\s*\^\s*(\{?\d+\}?)", lhs)
        if mc:
            j, i = int(mc.group(1)), int(mc.group(2))
            if not (1 <= i <= n and 1 <= j <= n):
                raise PresentationError(f"generator used before declared in {s!r}")
            if j <= i:
                raise PresentationError(f"commutator [x{j},x{i}] must have j > i")
            if (j - 1, i - 1) in comm:
                raise PresentationError(f"duplicate relation {lhs}")
            comm[(j - 1, i - 1)] = _parse_word(rhs, n, params)
        elif mp:
            i = int(mp.group(1))
            e = int(mp.group(2).strip("{}"))
            if not 1 <= i <= n:
                raise PresentationError(f"generator used before declared in {s!r}")
            if e != p:
                raise PresentationError(f"power relation must use exponent p={p}: {s!r}")
            if i - 1 in pow_words:
                raise PresentationError(f"duplicate relation {lhs}")
            pow_words[i - 1] = _parse_word(rhs, n, params)
        else:
            raise PresentationError(f"syntax error in {s!r}")

    # RHS words are reduced to normal form with a partial presentation built
    # from the higher-index relations first: word in gens > j only.
    pw = [(0,) * n] * n
    cm: dict[tuple[int, int], tuple] = {}
    for w_key in sorted(
        [("pow", i) for i in pow_words] + [("comm", j, i) for (j, i) in comm],
        key=lambda k: -k[1],
    ):
        word = pow_words[w_key[1]] if w_key[0] == "pow" else comm[(w_key[1], w_key[2])]
        lo = w_key[1]
        if any(g <= lo for g, _ in word):
            raise PresentationError(
                f"relation for x{lo + 1} refers to a generator of lower or equal index"
            )
        # collect in the sub-presentation of generators > lo, which is fully known
        sub = PcPresentation(p, n, tuple(pw), dict(cm), weights=(), defs={})
        val = sub.collect(word) if word else (0,) * n
        if w_key[0] == "pow":
            pw[lo] = val
        else:
            cm[(w_key[1], w_key[2])] = val
    P = PcPresentation(p, n, tuple(pw), cm)
    if check and not P.is_consistent():
        raise PresentationError("inconsistent presentation")
    if d_decl is not None and check and P.d != d_decl:
        raise PresentationError(f"header says d={d_decl} but presentation has {P.d} minimal generators")
    return P


def format_word(e: Element) -> str:
    parts = []
    for k, x in enumerate(e):
        if x == 1:
            parts.append(f"x{k + 1}")
        elif x:
            parts.append(f"x{k + 1}^{x}")
    return " ".join(parts) if parts else "1"


def serialize(P: PcPresentation) -> str:
    lines = [f"p={P.p} n={P.n} d={P.d}"]
    for i in range(P.n):
        if any(P.power[i]):
            lines.append(f"x{i + 1}^{P.p} = {format_word(P.power[i])}")
    for j in range(P.n):
        for i in range(j):
            if (j, i) in P.comm:
                lines.append(f"[x{j + 1},x{i + 1}] = {format_word(P.comm[(j, i)])}")
    return "\n".join(lines) + "\n"


def from_relations(
    p: int, n: int, relations: Mapping[tuple, Element], weights=None, defs=None
) -> PcPresentation:
    power = [relations.get(("pow", i), (0,) * n) for i in range(n)]
    comm = {(k[1], k[2]): v for k, v in relations.items() if k[0] == "comm"}
    return PcPresentation(p, n, tuple(power), comm, weights, defs)

"""Exact linear algebra and verification suites over module actions.

Vectors are the sparse dicts produced by the module actions; subspaces are
kept in reduced echelon form with deterministic pivoting (lowest index
tuple in the documented basis order, preferring exact unit coefficients),
so equal subspaces always produce identical bases.  Kernels and restricted
operator matrices are computed by exact elimination; relation verification
never materializes a matrix and instead sweeps operator identities basis
vector by basis vector, collecting a witness for every failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import rootdata
from .errors import NotInvariantError
from .schnizer import SchnizerModule, vec_accumulate, vec_eq, vec_scale, vec_sub


class SubmoduleBasis:
    """A subspace basis in reduced echelon form over the backend field."""

    def __init__(self, backend):
        self.backend = backend
        self.rows: list[tuple[tuple, dict]] = []  # (pivot index, row vector)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        """Residual of vec after eliminating every pivot coordinate."""
        backend = self.backend
        out = dict(vec)
        for pivot, row in self.rows:
            coef = out.get(pivot)
            if coef is None or backend.is_zero(coef):
                continue
            for idx, val in row.items():
                vec_accumulate(backend, out, idx, -coef * val)
        return {idx: c for idx, c in out.items() if not backend.is_zero(c)}

    def add(self, vec: dict) -> dict | None:
        """Insert a vector; returns the inserted normalized row, or None if dependent."""
        backend = self.backend
        residual = self.reduce(vec)
        if not residual:
            return None
        units = [idx for idx, c in residual.items() if backend.eq(c, backend.one)]
        pivot = min(units) if units else min(residual)
        coef = residual[pivot]
        if not backend.eq(coef, backend.one):
            inv = backend.inv(coef)
            residual = {idx: inv * c for idx, c in residual.items()}
        residual[pivot] = backend.one
        for _, row in self.rows:
            c = row.get(pivot)
            if c is None or backend.is_zero(c):
                continue
            for idx, val in residual.items():
                vec_accumulate(backend, row, idx, -c * val)
        self.rows.append((pivot, residual))
        self.rows.sort(key=lambda pr: pr[0])
        return dict(residual)

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def coordinates(self, vec: dict) -> list | None:
        """Coefficients of vec over the rows, or None if vec lies outside the span."""
        backend = self.backend
        coords = [vec.get(pivot, backend.zero) for pivot, _ in self.rows]
        probe = dict(vec)
        for (_, row), c in zip(self.rows, coords):
            if backend.is_zero(c):
                continue
            for idx, val in row.items():
                vec_accumulate(backend, probe, idx, -c * val)
        if any(not backend.is_zero(c) for c in probe.values()):
            return None
        return coords

    def vectors(self) -> list[dict]:
        return [dict(row) for _, row in self.rows]

    def same_span(self, other: "SubmoduleBasis") -> bool:
        if self.dim != other.dim:
            return False
        return all(other.contains(row) for _, row in self.rows)


def span_closure(backend, start, ops, ambient_dim: int | None = None) -> SubmoduleBasis:
    """Smallest subspace containing the start vectors and invariant under ops.

    Worklist algorithm with exact rank updates; stops early once the span
    fills the ambient space.
    """
    basis = SubmoduleBasis(backend)
    queue = []
    for vec in start:
        row = basis.add(vec)
        if row is not None:
            queue.append(row)
    pos = 0
    while pos < len(queue):
        if ambient_dim is not None and basis.dim >= ambient_dim:
            break
        vec = queue[pos]
        pos += 1
        for op in ops:
            row = basis.add(op(vec))
            if row is not None:
                queue.append(row)
    return basis


def joint_kernel(module: SchnizerModule, ops) -> SubmoduleBasis:
    """Exact basis of the intersection of the operator kernels.

    Builds the stacked constraint rows (one per output coordinate per
    operator), reduces them to echelon form, and reads the null space off
    the free columns.
    """
    backend = module.backend
    rowspace = SubmoduleBasis(backend)
    for op in ops:
        transpose: dict[tuple, dict] = {}
        for m in module.basis_indices():
            image = op({m: backend.one})
            for out_idx, coef in image.items():
                transpose.setdefault(out_idx, {})[m] = coef
        for row in transpose.values():
            rowspace.add(row)
    pivots = {pivot for pivot, _ in rowspace.rows}
    kernel = SubmoduleBasis(backend)
    for free in module.basis_indices():
        if free in pivots:
            continue
        vec = {free: backend.one}
        for pivot, row in rowspace.rows:
            coef = row.get(free)
            if coef is not None and not backend.is_zero(coef):
                vec[pivot] = -coef
        kernel.add(vec)
    return kernel


@dataclass
class OperatorMatrix:
    """Exact sparse matrix of an operator in a documented basis order."""

    nrows: int
    ncols: int
    entries: dict
    basis: str

    def eq(self, other: "OperatorMatrix", backend) -> bool:
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        for key in self.entries.keys() | other.entries.keys():
            a = self.entries.get(key, backend.zero)
            b = other.entries.get(key, backend.zero)
            if not backend.eq(a, b):
                return False
        return True

    def triplets(self, backend) -> list:
        return [
            [r, c, backend.serialize(v)]
            for (r, c), v in sorted(self.entries.items())
        ]


def materialize(op, module: SchnizerModule, restriction: SubmoduleBasis | None = None) -> OperatorMatrix:
    """Exact matrix of an operator; columns are images of the basis vectors.

    With a restriction basis, the matrix expresses the operator in submodule
    coordinates and raises NotInvariantError if any image leaves the span.
    """
    backend = module.backend
    entries: dict = {}
    if restriction is None:
        dim = module.dimension
        for col, m in enumerate(module.basis_indices()):
            image = op({m: backend.one})
            for out_idx, coef in image.items():
                entries[(module.index_position(out_idx), col)] = coef
        doc = "full module basis, index tuples in lexicographic order"
        return OperatorMatrix(dim, dim, entries, doc)
    dim = restriction.dim
    for col, vec in enumerate(restriction.vectors()):
        coords = restriction.coordinates(op(vec))
        if coords is None:
            raise NotInvariantError(
                f"operator maps restricted basis column {col} outside the span"
            )
        for row, coef in enumerate(coords):
            if not backend.is_zero(coef):
                entries[(row, col)] = coef
    doc = "restricted submodule basis, echelon rows in pivot order"
    return OperatorMatrix(dim, dim, entries, doc)


# -- relation verification ----------------------------------------------------


@dataclass
class RelationResult:
    relation: str
    passed: bool
    witness: dict | None = None


@dataclass
class RelationReport:
    level: str
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def to_dict(self, verbose_witnesses: bool = True) -> dict:
        items = []
        for r in self.results:
            item = {"relation": r.relation, "passed": r.passed}
            if r.witness is not None and verbose_witnesses:
                item["witness"] = r.witness
            items.append(item)
        return {"level": self.level, "passed": self.passed, "relations": items}


def serialize_vector(backend, vec: dict) -> dict:
    return {
        ",".join(map(str, idx)): backend.serialize(coef)
        for idx, coef in sorted(vec.items())
    }


def _check_identity(module, relation, lhs, rhs, results) -> None:
    backend = module.backend
    for m in module.basis_indices():
        v = {m: backend.one}
        left = lhs(v)
        right = rhs(v)
        if not vec_eq(backend, left, right):
            results.append(
                RelationResult(
                    relation,
                    False,
                    {
                        "index": list(m),
                        "lhs": serialize_vector(backend, left),
                        "rhs": serialize_vector(backend, right),
                    },
                )
            )
            return
    results.append(RelationResult(relation, True))


def _serre_lhs(backend, x, y):
    two = backend.q_int(2)

    def lhs(v):
        out = x(x(y(v)))
        out = vec_sub(backend, out, vec_scale(backend, two, x(y(x(v)))))
        for idx, coef in y(x(x(v))).items():
            vec_accumulate(backend, out, idx, coef)
        return out

    return lhs


def _zero_op(v):
    return {}


def verify_relations(target, level: str = "finite", operators: dict | None = None) -> RelationReport:
    """Check the defining relations as exact operator identities.

    level "finite" takes a SchnizerModule and sweeps every generator pair of
    the finite Cartan matrix; level "affine" takes an EvaluationModule and
    additionally checks every relation involving the index-0 generators
    against the affine Cartan matrix.  An explicit operators map overrides
    the module's own (used by corruption self-tests).
    """
    if level == "finite":
        module = target
        ops = operators if operators is not None else module.finite_generator_map()
        cartan = rootdata.cartan_finite(module.n)
        indices = range(1, module.n + 1)
        offset = 1
        pairs_comm = [(i, j) for i in indices for j in indices]
    elif level == "affine":
        module = target.base
        ops = operators if operators is not None else target.affine_generator_map()
        cartan = rootdata.cartan_affine(module.n)
        indices = range(0, module.n + 1)
        offset = 0
        pairs_comm = [(0, j) for j in indices] + [(i, 0) for i in indices if i != 0]
    else:
        raise ValueError(f"level must be 'finite' or 'affine', got {level!r}")

    backend = module.backend
    report = RelationReport(level)
    results = report.results
    dkey = backend.inv(backend.eps - backend.eps_pow(-1))

    def pairing(i, j):
        return cartan[i - offset][j - offset]

    for i in indices:
        k, k_inv = ops[f"k{i}"], ops[f"k{i}_inv"]
        for j in indices:
            for kind, sgn in (("e", 1), ("f", -1)):
                x = ops[f"{kind}{j}"]
                factor = backend.eps_pow(sgn * pairing(i, j))
                _check_identity(
                    module,
                    f"kconj:k{i},{kind}{j}",
                    lambda v, k=k, k_inv=k_inv, x=x: k(x(k_inv(v))),
                    lambda v, x=x, factor=factor: vec_scale(backend, factor, x(v)),
                    results,
                )

    for i, j in pairs_comm:
        e, f = ops[f"e{i}"], ops[f"f{j}"]

        def lhs(v, e=e, f=f):
            return vec_sub(backend, e(f(v)), f(e(v)))

        if i == j:
            k, k_inv = ops[f"k{i}"], ops[f"k{i}_inv"]

            def rhs(v, k=k, k_inv=k_inv):
                return vec_scale(backend, dkey, vec_sub(backend, k(v), k_inv(v)))

        else:
            rhs = _zero_op
        _check_identity(module, f"commutator:e{i},f{j}", lhs, rhs, results)

    serre_pairs = [
        (i, j)
        for i in indices
        for j in indices
        if i != j and pairing(i, j) == -1 and (level == "finite" or 0 in (i, j))
    ]
    for i, j in serre_pairs:
        for kind in ("e", "f"):
            x, y = ops[f"{kind}{i}"], ops[f"{kind}{j}"]
            _check_identity(
                module,
                f"serre:{kind}{i},{kind}{j}",
                _serre_lhs(backend, x, y),
                _zero_op,
                results,
            )

    commute_pairs = [
        (i, j)
        for i in indices
        for j in indices
        if i < j and pairing(i, j) == 0 and (level == "finite" or i == 0)
    ]
    for i, j in commute_pairs:
        for kind in ("e", "f"):
            x, y = ops[f"{kind}{i}"], ops[f"{kind}{j}"]
            _check_identity(
                module,
                f"commute:{kind}{i},{kind}{j}",
                lambda v, x=x, y=y: vec_sub(backend, x(y(v)), y(x(v))),
                _zero_op,
                results,
            )

    if level == "finite":
        for i in indices:
            for j in indices:
                if i > j:
                    continue
                coeffs = [0] * module.n
                coeffs[i - 1] += 1
                coeffs[j - 1] += 1
                ki, kj = ops[f"k{i}"], ops[f"k{j}"]
                _check_identity(
                    module,
                    f"torus:k{i},k{j}",
                    lambda v, ki=ki, kj=kj: ki(kj(v)),
                    lambda v, coeffs=tuple(coeffs): module.act_k_root(coeffs, v),
                    results,
                )
    return report


def check_nilpotent_type1(module: SchnizerModule) -> RelationReport:
    """Verify E_i^l = F_i^l = 0 and K_i^l = identity on the whole module."""
    backend = module.backend
    l = module.l
    report = RelationReport("nilpotency")
    results = report.results

    for i in range(1, module.n + 1):
        for kind in ("e", "f"):
            op = module.e_op(i) if kind == "e" else module.f_op(i)

            def power_l(v, op=op):
                for _ in range(l):
                    v = op(v)
                return v

            _check_identity(module, f"nilpotent:{kind}{i}^{l}", power_l, _zero_op, results)

        k = module.k_op(i)

        def k_power(v, k=k):
            for _ in range(l):
                v = k(v)
            return v

        _check_identity(
            module, f"torus_order:k{i}^{l}", k_power, lambda v: dict(v), results
        )
    return report


def primitive_vectors(module: SchnizerModule, ops=None) -> SubmoduleBasis:
    """Joint kernel of the raising set (default: all finite raising generators)."""
    if ops is None:
        ops = [module.e_op(i) for i in range(1, module.n + 1)]
    return joint_kernel(module, ops)

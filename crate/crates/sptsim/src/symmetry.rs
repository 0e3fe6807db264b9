//! Chain symmetries, sector projectors and channel classification.
//!
//! The protected structure of the cluster chain is the Z2 x Z2 group
//! generated by the sublattice parities. On an open chain the parities are
//! stabilizer products and pick up Z letters at the edges; the total
//! parity is `Y X ... X Y`. Everything here works on exact Pauli strings,
//! with floats entering only through character tables and witnesses.

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::{Letter, PauliString, Phase};
use crate::real::Real;
use crate::state::{KrausChannel, MixedState};
use num_complex::{Complex, Complex64};

/// Chain boundary condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Open => f.write_str("open"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

/// Which resource state a probe circuit prepares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    /// CZ-entangled chain of plus states.
    Cluster,
    /// Bare product of plus states.
    Trivial,
}

impl std::fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResourceKind::Cluster => f.write_str("cluster"),
            ResourceKind::Trivial => f.write_str("trivial"),
        }
    }
}

/// Parity operator selector for [`sublattice_parity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityKind {
    Odd,
    Even,
    Total,
    /// Restriction of the total parity to the first `l_a` sites.
    Subsystem(usize),
}

fn check_length(l: usize) -> Result<()> {
    if l < 2 {
        return Err(Error::ChainTooShort(l));
    }
    Ok(())
}

/// Stabilizer generators `h_i = Z_{i-1} X_i Z_{i+1}` of the chain, with
/// the single-Z edge forms on open boundaries. Index `i` of the result is
/// the generator centred on qubit `i`.
pub fn cluster_stabilizers(l: usize, boundary: Boundary) -> Result<Vec<PauliString>> {
    check_length(l)?;
    let mut out = Vec::with_capacity(l);
    for i in 0..l {
        let mut sites = vec![(i, Letter::X)];
        match boundary {
            Boundary::Periodic => {
                sites.push(((i + l - 1) % l, Letter::Z));
                sites.push(((i + 1) % l, Letter::Z));
            }
            Boundary::Open => {
                if i > 0 {
                    sites.push((i - 1, Letter::Z));
                }
                if i + 1 < l {
                    sites.push((i + 1, Letter::Z));
                }
            }
        }
        out.push(PauliString::from_sites(l, &sites)?);
    }
    Ok(out)
}

/// Sublattice and total parity operators as exact stabilizer products.
///
/// Odd/even means the 1-based site parity, so the odd parity is the
/// product of generators on qubits 0, 2, 4, ... On a ring the edge Z
/// letters cancel pairwise and the parities reduce to pure X sublattice
/// products; this needs even length. The subsystem variant restricts the
/// total parity to a prefix and keeps phase +1 for a strict prefix.
pub fn sublattice_parity(l: usize, boundary: Boundary, which: ParityKind) -> Result<PauliString> {
    check_length(l)?;
    if boundary == Boundary::Periodic && !l.is_multiple_of(2) {
        return Err(Error::PeriodicOddLength(l));
    }
    let stabilizers = cluster_stabilizers(l, boundary)?;
    let product_over = |step_offset: usize| -> Result<PauliString> {
        let mut acc = PauliString::identity(l);
        for i in (step_offset..l).step_by(2) {
            acc = acc.mul(&stabilizers[i])?;
        }
        Ok(acc)
    };
    match which {
        ParityKind::Odd => product_over(0),
        ParityKind::Even => product_over(1),
        ParityKind::Total => {
            let mut acc = PauliString::identity(l);
            for h in &stabilizers {
                acc = acc.mul(h)?;
            }
            Ok(acc)
        }
        ParityKind::Subsystem(l_a) => {
            if l_a == 0 || l_a > l {
                return Err(Error::InvalidSubsystem { l_a, l });
            }
            let total = sublattice_parity(l, boundary, ParityKind::Total)?;
            let letters: Vec<Letter> = total.letters()[..l_a].to_vec();
            let phase = if l_a == l { total.phase() } else { Phase::ONE };
            Ok(PauliString::from_letters(letters).with_phase(phase))
        }
    }
}

/// Parity operator measured on a prefix of the given resource state. The
/// cluster uses the edge-rotated total parity; the trivial product state
/// conserves the plain X parity.
pub fn prefix_parity(kind: ResourceKind, l: usize, boundary: Boundary, l_a: usize) -> Result<PauliString> {
    match kind {
        ResourceKind::Cluster => sublattice_parity(l, boundary, ParityKind::Subsystem(l_a)),
        ResourceKind::Trivial => {
            if l_a == 0 || l_a > l {
                return Err(Error::InvalidSubsystem { l_a, l });
            }
            Ok(PauliString::from_letters(vec![Letter::X; l_a]))
        }
    }
}

/// Single-site operators that commute with the clean reduced state and
/// witness symmetry breaking when a channel disturbs them. An open prefix
/// has one entangling cut, at its far edge; a ring subsystem has two.
pub fn edge_symmetry_ops(boundary: Boundary, l_a: usize) -> Result<Vec<PauliString>> {
    if l_a == 0 {
        return Err(Error::InvalidSubsystem { l_a, l: 0 });
    }
    let z_last = PauliString::single(l_a, l_a - 1, Letter::Z)?;
    match boundary {
        Boundary::Open => Ok(vec![z_last]),
        Boundary::Periodic => {
            let z_first = PauliString::single(l_a, 0, Letter::Z)?;
            if l_a == 1 {
                Ok(vec![z_first])
            } else {
                Ok(vec![z_first, z_last])
            }
        }
    }
}

/// Finite abelian group with its multiplication and character tables.
///
/// Element 0 is the identity. Characters are stored in `f64` since they
/// are exact roots of unity at either scalar width.
#[derive(Clone, Debug)]
pub struct AbelianGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    characters: Vec<Vec<Complex64>>,
}

impl AbelianGroup {
    pub fn new(
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
        characters: Vec<Vec<Complex64>>,
    ) -> Result<AbelianGroup> {
        let order = labels.len();
        let fail = |msg: &str| Err(Error::InvalidGroup(msg.to_string()));
        if order == 0 || table.len() != order || table.iter().any(|r| r.len() != order) {
            return fail("table must be square and match the label count");
        }
        for row in &table {
            for &e in row {
                if e >= order {
                    return fail("table entry out of range");
                }
            }
        }
        for g in 0..order {
            if table[0][g] != g || table[g][0] != g {
                return fail("element 0 must be the identity");
            }
            let mut seen = vec![false; order];
            for h in 0..order {
                seen[table[g][h]] = true;
            }
            if seen.iter().any(|s| !s) {
                return fail("rows must be permutations");
            }
        }
        for g in 0..order {
            for h in 0..order {
                if table[g][h] != table[h][g] {
                    return fail("multiplication must be commutative");
                }
                for k in 0..order {
                    if table[table[g][h]][k] != table[g][table[h][k]] {
                        return fail("multiplication must be associative");
                    }
                }
            }
        }
        let group = AbelianGroup {
            labels,
            table,
            characters,
        };
        group.validate_characters()?;
        Ok(group)
    }

    fn validate_characters(&self) -> Result<()> {
        let order = self.order();
        let fail = |msg: String| Err(Error::CharacterMismatch(msg));
        if self.characters.len() != order || self.characters.iter().any(|r| r.len() != order) {
            return fail("character table must be square of group order".into());
        }
        let tol = 1e-12;
        for (k, row) in self.characters.iter().enumerate() {
            if (row[0] - Complex64::new(1.0, 0.0)).norm() > tol {
                return fail(format!("character {k} must map the identity to 1"));
            }
            for g in 0..order {
                for h in 0..order {
                    let lhs = row[g] * row[h];
                    let rhs = row[self.table[g][h]];
                    if (lhs - rhs).norm() > tol {
                        return fail(format!("character {k} is not multiplicative"));
                    }
                }
            }
        }
        for k1 in 0..order {
            for k2 in 0..order {
                let dot: Complex64 = (0..order)
                    .map(|g| self.characters[k1][g] * self.characters[k2][g].conj())
                    .sum();
                let expect = if k1 == k2 { order as f64 } else { 0.0 };
                if (dot - Complex64::new(expect, 0.0)).norm() > tol * order as f64 {
                    return fail(format!("characters {k1} and {k2} are not orthogonal"));
                }
            }
        }
        Ok(())
    }

    /// Cyclic group of order `n`, characters `chi_k(g^j) = exp(2 pi i k j / n)`.
    pub fn cyclic(n: usize) -> AbelianGroup {
        let labels = (0..n)
            .map(|j| match j {
                0 => "e".to_string(),
                1 => "g".to_string(),
                _ => format!("g{j}"),
            })
            .collect();
        let table = (0..n)
            .map(|g| (0..n).map(|h| (g + h) % n).collect())
            .collect();
        let characters = (0..n)
            .map(|k| {
                (0..n)
                    .map(|j| {
                        Complex64::from_polar(
                            1.0,
                            2.0 * std::f64::consts::PI * (k * j % n) as f64 / n as f64,
                        )
                    })
                    .collect()
            })
            .collect();
        AbelianGroup::new(labels, table, characters).expect("cyclic group construction")
    }

    pub fn z2() -> AbelianGroup {
        AbelianGroup::cyclic(2)
    }

    pub fn z4() -> AbelianGroup {
        AbelianGroup::cyclic(4)
    }

    /// Direct product; element index is `a * |B| + b`, character index
    /// likewise.
    pub fn direct_product(a: &AbelianGroup, b: &AbelianGroup) -> AbelianGroup {
        let na = a.order();
        let nb = b.order();
        let order = na * nb;
        let labels = (0..order)
            .map(|x| format!("({},{})", a.labels[x / nb], b.labels[x % nb]))
            .collect();
        let table = (0..order)
            .map(|x| {
                (0..order)
                    .map(|y| {
                        let ga = a.table[x / nb][y / nb];
                        let gb = b.table[x % nb][y % nb];
                        ga * nb + gb
                    })
                    .collect()
            })
            .collect();
        let characters = (0..order)
            .map(|k| {
                (0..order)
                    .map(|x| a.characters[k / nb][x / nb] * b.characters[k % nb][x % nb])
                    .collect()
            })
            .collect();
        AbelianGroup::new(labels, table, characters).expect("product group construction")
    }

    pub fn z2xz2() -> AbelianGroup {
        AbelianGroup::direct_product(&AbelianGroup::z2(), &AbelianGroup::z2())
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn multiply(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn character(&self, k: usize, g: usize) -> Complex64 {
        self.characters[k][g]
    }

    /// Human-readable sector tag: the character values on the group
    /// generators (all non-identity elements for order 2 factors reduce
    /// to the canonical generator set).
    pub fn sector_label(&self, k: usize) -> String {
        let fmt = |c: Complex64| -> String {
            let tol = 1e-9;
            if (c - Complex64::new(1.0, 0.0)).norm() < tol {
                "+1".into()
            } else if (c + Complex64::new(1.0, 0.0)).norm() < tol {
                "-1".into()
            } else if (c - Complex64::new(0.0, 1.0)).norm() < tol {
                "+i".into()
            } else if (c + Complex64::new(0.0, 1.0)).norm() < tol {
                "-i".into()
            } else {
                format!("{:.3}{:+.3}i", c.re, c.im)
            }
        };
        match self.generator_indices().as_slice() {
            [g] => fmt(self.characters[k][*g]),
            gens => {
                let parts: Vec<String> = gens.iter().map(|&g| fmt(self.characters[k][g])).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    /// Minimal generating set found greedily from the table.
    fn generator_indices(&self) -> Vec<usize> {
        let order = self.order();
        let mut generated = vec![false; order];
        generated[0] = true;
        let mut gens = Vec::new();
        for g in 1..order {
            if generated[g] {
                continue;
            }
            gens.push(g);
            let mut frontier: Vec<usize> = (0..order).filter(|&x| generated[x]).collect();
            while let Some(x) = frontier.pop() {
                let y = self.table[x][g];
                if !generated[y] {
                    generated[y] = true;
                    frontier.push(y);
                }
            }
            // Close under repeated application of every known generator.
            loop {
                let mut changed = false;
                for x in 0..order {
                    if !generated[x] {
                        continue;
                    }
                    for &gg in &gens {
                        let y = self.table[x][gg];
                        if !generated[y] {
                            generated[y] = true;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        gens
    }
}

/// Unitary representation of an [`AbelianGroup`] by Pauli strings.
#[derive(Clone, Debug)]
pub struct SymmetryAction {
    strings: Vec<PauliString>,
}

impl SymmetryAction {
    /// Validates string shapes, mutual commutation and the exact
    /// representation property `U(g) U(h) = U(gh)` including phases.
    pub fn new(group: &AbelianGroup, strings: Vec<PauliString>) -> Result<SymmetryAction> {
        if strings.len() != group.order() {
            return Err(Error::InvalidAction(format!(
                "need {} strings, got {}",
                group.order(),
                strings.len()
            )));
        }
        let n = strings[0].n_sites();
        for s in &strings {
            if s.n_sites() != n {
                return Err(Error::PauliLengthMismatch {
                    left: s.n_sites(),
                    right: n,
                });
            }
        }
        if strings[0] != PauliString::identity(n) {
            return Err(Error::InvalidAction(
                "element 0 must act as the identity string".to_string(),
            ));
        }
        for g in 0..strings.len() {
            for h in 0..strings.len() {
                if !strings[g].commutes_with(&strings[h])? {
                    return Err(Error::NonCommutingActions(g, h));
                }
                let product = strings[g].mul(&strings[h])?;
                let expected = &strings[group.multiply(g, h)];
                if product != *expected {
                    return Err(Error::InvalidAction(format!(
                        "U({g}) U({h}) = {product} but the table expects {expected}"
                    )));
                }
            }
        }
        Ok(SymmetryAction { strings })
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn n_sites(&self) -> usize {
        self.strings[0].n_sites()
    }

    /// Restriction of every string to `sites` (new site `j` is old site
    /// `sites[j]`); phases carry over unchanged.
    pub fn restricted_to(&self, group: &AbelianGroup, sites: &[usize]) -> Result<SymmetryAction> {
        let mut strings = Vec::with_capacity(self.strings.len());
        for s in &self.strings {
            let mut letters = Vec::with_capacity(sites.len());
            for &q in sites {
                if q >= s.n_sites() {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n_qubits: s.n_sites(),
                    });
                }
                letters.push(s.letter(q));
            }
            strings.push(PauliString::from_letters(letters).with_phase(s.phase()));
        }
        SymmetryAction::new(group, strings)
    }

    /// Largest commutator witness against a stabilizer list; exact zero
    /// means every action commutes with every stabilizer.
    pub fn check_commutes_with(&self, stabilizers: &[PauliString]) -> Result<bool> {
        for s in &self.strings {
            for h in stabilizers {
                if !s.commutes_with(h)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The Z2 x Z2 sublattice-parity action on the full chain, ordered
/// (identity, odd, even, odd*even).
pub fn cluster_symmetry_action(
    l: usize,
    boundary: Boundary,
) -> Result<(AbelianGroup, SymmetryAction)> {
    let group = AbelianGroup::z2xz2();
    let odd = sublattice_parity(l, boundary, ParityKind::Odd)?;
    let even = sublattice_parity(l, boundary, ParityKind::Even)?;
    let both = odd.mul(&even)?;
    // Element order must match z2xz2 indexing: (e,e), (e,g), (g,e), (g,g)
    // with the first factor chosen as the odd parity.
    let strings = vec![PauliString::identity(l), even.clone(), odd, both];
    let action = SymmetryAction::new(&group, strings)?;
    Ok((group, action))
}

/// Z2 action generated by the prefix parity of a resource state, on the
/// subsystem register.
pub fn prefix_parity_action(
    kind: ResourceKind,
    l: usize,
    boundary: Boundary,
    l_a: usize,
) -> Result<(AbelianGroup, SymmetryAction)> {
    let group = AbelianGroup::z2();
    let parity = prefix_parity(kind, l, boundary, l_a)?;
    let action = SymmetryAction::new(&group, vec![PauliString::identity(l_a), parity])?;
    Ok((group, action))
}

/// Projector onto one character sector, kept as a lazy sum of Pauli
/// strings: `P_k = (1/|G|) sum_g conj(chi_k(g)) U(g)`.
#[derive(Clone, Debug)]
pub struct SectorProjector<T> {
    sector: usize,
    label: String,
    terms: Vec<(Complex<T>, PauliString)>,
}

/// Builds the projector for sector `k`. With the conjugated character the
/// projected subspace is the one where `U(g)` has eigenvalue `chi_k(g)`;
/// for real character tables the conjugation is a no-op.
pub fn build_sector_projector<T: Real>(
    group: &AbelianGroup,
    k: usize,
    action: &SymmetryAction,
) -> Result<SectorProjector<T>> {
    if k >= group.order() {
        return Err(Error::SectorOutOfRange {
            sector: k,
            order: group.order(),
        });
    }
    if action.strings().len() != group.order() {
        return Err(Error::InvalidAction(
            "action does not match group order".to_string(),
        ));
    }
    let inv_order = T::one() / T::of(group.order() as f64);
    let terms = action
        .strings()
        .iter()
        .enumerate()
        .map(|(g, s)| {
            let chi = group.character(k, g).conj();
            let coeff = Complex::new(T::of(chi.re), T::of(chi.im)) * inv_order;
            (coeff, s.clone())
        })
        .collect();
    Ok(SectorProjector {
        sector: k,
        label: group.sector_label(k),
        terms,
    })
}

impl<T: Real> SectorProjector<T> {
    pub fn sector(&self) -> usize {
        self.sector
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_sites(&self) -> usize {
        self.terms[0].1.n_sites()
    }

    pub fn terms(&self) -> &[(Complex<T>, PauliString)] {
        &self.terms
    }

    /// Tr[M P] for a row-major matrix of matching dimension, without
    /// densifying the projector.
    pub fn trace_against(&self, mat: &[Complex<T>], dim: usize) -> Result<Complex<T>> {
        if dim != 1usize << self.n_sites() || mat.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                got: mat.len(),
                expected: (1usize << self.n_sites()) * (1usize << self.n_sites()),
            });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (coeff, s) in &self.terms {
            let masks = s.masks();
            let mut term = Complex::new(T::zero(), T::zero());
            for x in 0..dim {
                let (xf, c) = masks.apply_to_basis::<T>(x);
                term += mat[x * dim + xf] * c;
            }
            acc += *coeff * term;
        }
        Ok(acc)
    }

    /// Dense matrix; refuses subsystems above 8 sites.
    pub fn densify(&self) -> Result<Vec<Complex<T>>> {
        let n = self.n_sites();
        if n > 8 {
            return Err(Error::DensifyTooLarge(n));
        }
        let dim = 1usize << n;
        let mut out = linalg::zeros::<T>(dim);
        for (coeff, s) in &self.terms {
            let m = s.to_matrix::<T>();
            for (o, e) in out.iter_mut().zip(m) {
                *o += *coeff * e;
            }
        }
        Ok(out)
    }
}

/// Result of a symmetry-resolved moment: the value, the size of the
/// discarded imaginary part and whether the projector commuted with the
/// state within tolerance.
#[derive(Clone, Copy, Debug)]
pub struct ResolvedMoment<T> {
    pub value: T,
    pub imag_magnitude: T,
    pub commuting: bool,
}

/// Tr[rho^n P_k]. When `[P_k, rho]` exceeds `tol` the flag is lowered and
/// the real part is still returned.
pub fn symmetry_resolved_moment<T: Real>(
    rho: &MixedState<T>,
    projector: &SectorProjector<T>,
    n: u32,
    tol: T,
) -> Result<ResolvedMoment<T>> {
    if n < 1 {
        return Err(Error::InvalidRenyiIndex(n));
    }
    if projector.n_sites() != rho.n_qubits() {
        return Err(Error::PauliLengthMismatch {
            left: projector.n_sites(),
            right: rho.n_qubits(),
        });
    }
    let mut commuting = true;
    for (_, s) in projector.terms() {
        if symmetry_commutator_norm(rho, s)? > tol {
            commuting = false;
            break;
        }
    }
    let dim = rho.dim();
    let powered;
    let mat = if n == 1 {
        rho.matrix()
    } else {
        powered = linalg::matrix_power(rho.matrix(), dim, n);
        &powered
    };
    let value = projector.trace_against(mat, dim)?;
    Ok(ResolvedMoment {
        value: value.re,
        imag_magnitude: value.im.abs(),
        commuting,
    })
}

/// Largest entry magnitude of `[t, rho]`, computed through the basis
/// action of the string.
pub fn symmetry_commutator_norm<T: Real>(rho: &MixedState<T>, t: &PauliString) -> Result<T> {
    if t.n_sites() != rho.n_qubits() {
        return Err(Error::PauliLengthMismatch {
            left: t.n_sites(),
            right: rho.n_qubits(),
        });
    }
    let dim = rho.dim();
    let masks = t.masks();
    let mut worst = T::zero();
    for x in 0..dim {
        // Coefficient of t on the flipped row: t |x^f> = c(x^f) |x>.
        let (back, cx) = masks.apply_to_basis::<T>(x ^ masks.flip);
        debug_assert_eq!(back, x);
        for y in 0..dim {
            // (t rho)[x, y] = c(x^f) rho[x^f, y]; (rho t)[x, y] = c(y) rho[x, y^f].
            let (yf, cy) = masks.apply_to_basis::<T>(y);
            let diff = cx * rho.entry(x ^ masks.flip, y) - cy * rho.entry(x, yf);
            worst = worst.max(diff.norm());
        }
    }
    Ok(worst)
}

/// Channel applications paired with the qubits they hit, in order.
pub type ChannelApplication<T> = (KrausChannel<T>, Vec<usize>);

/// Inputs for [`classify_channel`]: the clean full state, the subsystem
/// whose reduced matrix is inspected, and the operators that must keep
/// commuting with it.
pub struct SymmetryContext<'a, T> {
    pub state: &'a MixedState<T>,
    pub subsystem: Vec<usize>,
    pub preserved_ops: Vec<PauliString>,
    pub tol: T,
}

/// Verdict of [`classify_channel`].
#[derive(Clone, Debug)]
pub struct Classification<T> {
    pub preserving: bool,
    pub witness: T,
    pub per_op: Vec<T>,
}

/// Default tolerance for commutator witnesses.
pub fn default_commutator_tol<T: Real>() -> T {
    T::of(1e-8)
}

/// Applies the channel list to a copy of the clean state and reports the
/// worst commutator witness on the reduced subsystem. Errors if the clean
/// state itself fails the commutation precondition.
pub fn classify_channel<T: Real>(
    applications: &[ChannelApplication<T>],
    ctx: &SymmetryContext<'_, T>,
) -> Result<Classification<T>> {
    let clean = ctx.state.partial_trace(&ctx.subsystem)?;
    for op in &ctx.preserved_ops {
        let w = symmetry_commutator_norm(&clean, op)?;
        if w > ctx.tol {
            return Err(Error::ContextNotSymmetric {
                witness: w.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let mut noisy = ctx.state.clone();
    for (channel, targets) in applications {
        noisy.apply_kraus(channel, targets)?;
    }
    let reduced = noisy.partial_trace(&ctx.subsystem)?;
    let per_op: Vec<T> = ctx
        .preserved_ops
        .iter()
        .map(|op| symmetry_commutator_norm(&reduced, op))
        .collect::<Result<_>>()?;
    let witness = per_op.iter().fold(T::zero(), |acc, &w| acc.max(w));
    Ok(Classification {
        preserving: witness <= ctx.tol,
        witness,
        per_op,
    })
}

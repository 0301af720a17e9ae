//! The tangle-with-coupon diagram category at α = −q^{-6}, β = [7]_q − 1.
//!
//! Diagrams are slice lists read bottom-to-top; each slice is a row of atoms
//! read left-to-right.  The evaluation functor sends a diagram to an exact
//! linear map between tensor powers of V.  [`reduce_to_acyclic`] rewrites a
//! diagram into a linear combination of crossing-free, cycle-free trivalent
//! diagrams with the same evaluation.

use crate::exactq::RatFunc;
use crate::rep::{self, structure_maps};
use crate::tensorla::{apply_at, LegIndex, LinMap, SpanTracker, SparseTensor};
use crate::Check;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

fn qp(k: i64) -> RatFunc {
    RatFunc::q_pow(k)
}

/// The generating atoms of diagram slices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Id,
    Cup,
    Cap,
    Over,
    Under,
    Merge,
    Split,
}

impl Atom {
    /// (inputs, outputs) of the atom, read bottom-to-top.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Atom::Id => (1, 1),
            Atom::Cup => (0, 2),
            Atom::Cap => (2, 0),
            Atom::Over | Atom::Under => (2, 2),
            Atom::Merge => (2, 1),
            Atom::Split => (1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Atom::Id => "id",
            Atom::Cup => "cup",
            Atom::Cap => "cap",
            Atom::Over => "over",
            Atom::Under => "under",
            Atom::Merge => "merge",
            Atom::Split => "split",
        }
    }

    pub fn from_name(name: &str) -> Option<Atom> {
        Some(match name {
            "id" => Atom::Id,
            "cup" => Atom::Cup,
            "cap" => Atom::Cap,
            "over" => Atom::Over,
            "under" => Atom::Under,
            "merge" => Atom::Merge,
            "split" => Atom::Split,
            _ => return None,
        })
    }
}

/// Errors from diagram construction and parsing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DiagramError {
    /// Unknown token; `column` is the 0-based character offset in the source.
    Syntax { column: usize, token: String },
    /// An empty slice (e.g. `"cup ; ; cap"`).
    EmptySlice { slice: usize },
    /// Consecutive slice widths do not compose.
    Width {
        slice: usize,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for DiagramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramError::Syntax { column, token } => {
                write!(f, "syntax error at column {}: unknown token {:?}", column, token)
            }
            DiagramError::EmptySlice { slice } => write!(f, "slice {} is empty", slice),
            DiagramError::Width {
                slice,
                expected,
                found,
            } => write!(
                f,
                "width mismatch at slice {}: expected {} inputs, found {}",
                slice, expected, found
            ),
        }
    }
}

/// A diagram: slices bottom-to-top, atoms left-to-right, with validated
/// widths.  A diagram with no slices is the identity on `bottom` strands.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Diagram {
    slices: Vec<Vec<Atom>>,
    bottom: usize,
    top: usize,
}

impl Diagram {
    /// Validate slice widths and build a diagram.
    pub fn new(slices: Vec<Vec<Atom>>) -> Result<Diagram, DiagramError> {
        let mut width: Option<usize> = None;
        let mut bottom = 0;
        for (k, slice) in slices.iter().enumerate() {
            if slice.is_empty() {
                return Err(DiagramError::EmptySlice { slice: k });
            }
            let ins: usize = slice.iter().map(|a| a.arity().0).sum();
            let outs: usize = slice.iter().map(|a| a.arity().1).sum();
            match width {
                None => bottom = ins,
                Some(w) => {
                    if w != ins {
                        return Err(DiagramError::Width {
                            slice: k,
                            expected: w,
                            found: ins,
                        });
                    }
                }
            }
            width = Some(outs);
        }
        let top = width.unwrap_or(bottom);
        Ok(Diagram {
            slices,
            bottom,
            top,
        })
    }

    /// The identity diagram on `n` strands (no slices).
    pub fn identity(n: usize) -> Diagram {
        Diagram {
            slices: Vec::new(),
            bottom: n,
            top: n,
        }
    }

    /// A single-atom diagram.
    pub fn atom(a: Atom) -> Diagram {
        Diagram::new(vec![vec![a]]).expect("single atom is valid")
    }

    pub fn slices(&self) -> &[Vec<Atom>] {
        &self.slices
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Total number of atoms (identity strands of implicit padding included
    /// only where written).
    pub fn atom_count(&self) -> usize {
        self.slices.iter().map(|s| s.len()).sum()
    }

    /// Horizontal composition: `self` to the left of `other`.
    pub fn tensor(&self, other: &Diagram) -> Diagram {
        // Align slice counts by padding the shorter one with identity rows.
        let rows = self.slices.len().max(other.slices.len());
        let mut slices = Vec::with_capacity(rows);
        for k in 0..rows {
            let mut row: Vec<Atom> = Vec::new();
            match self.slices.get(k) {
                Some(s) => row.extend(s.iter().copied()),
                None => row.extend(std::iter::repeat(Atom::Id).take(self.top)),
            }
            match other.slices.get(k) {
                Some(s) => row.extend(s.iter().copied()),
                None => row.extend(std::iter::repeat(Atom::Id).take(other.top)),
            }
            slices.push(row);
        }
        if slices.is_empty() {
            return Diagram::identity(self.bottom + other.bottom);
        }
        Diagram::new(slices).expect("tensor of valid diagrams is valid")
    }

    /// Vertical composition: `other` stacked on top of `self`.
    ///
    /// # Panics
    ///
    /// Panics if the boundary widths do not compose.
    pub fn then(&self, other: &Diagram) -> Diagram {
        assert_eq!(
            self.top, other.bottom,
            "vertical composition width mismatch"
        );
        let mut slices = self.slices.clone();
        slices.extend(other.slices.iter().cloned());
        if slices.is_empty() {
            return Diagram::identity(self.bottom);
        }
        Diagram::new(slices).expect("stack of valid diagrams is valid")
    }

    /// Parse the DSL `slice (';' slice)*` with whitespace-separated atoms.
    pub fn parse(src: &str) -> Result<Diagram, DiagramError> {
        let mut slices: Vec<Vec<Atom>> = vec![Vec::new()];
        let mut token_start = 0usize;
        let mut token = String::new();
        let flush =
            |token: &mut String, start: usize, slices: &mut Vec<Vec<Atom>>| -> Result<(), DiagramError> {
                if token.is_empty() {
                    return Ok(());
                }
                match Atom::from_name(token) {
                    Some(a) => slices.last_mut().expect("nonempty").push(a),
                    None => {
                        return Err(DiagramError::Syntax {
                            column: start,
                            token: token.clone(),
                        })
                    }
                }
                token.clear();
                Ok(())
            };
        for (pos, ch) in src.char_indices() {
            if ch == ';' {
                flush(&mut token, token_start, &mut slices)?;
                slices.push(Vec::new());
            } else if ch.is_whitespace() {
                flush(&mut token, token_start, &mut slices)?;
            } else {
                if token.is_empty() {
                    token_start = pos;
                }
                token.push(ch);
            }
        }
        flush(&mut token, token_start, &mut slices)?;
        Diagram::new(slices)
    }
}

impl fmt::Display for Diagram {
    /// Canonical DSL form: lowercase atoms, single spaces, slices joined by
    /// `" ; "`.  The slice-free identity prints as a single row of `id`s.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = if self.slices.is_empty() {
            vec![vec!["id"; self.bottom].join(" ")]
        } else {
            self.slices
                .iter()
                .map(|s| s.iter().map(|a| a.name()).collect::<Vec<_>>().join(" "))
                .collect()
        };
        write!(f, "{}", rows.join(" ; "))
    }
}

/// Functor value of a single atom.
pub fn atom_value(a: Atom) -> LinMap {
    let m = structure_maps();
    match a {
        Atom::Id => LinMap::identity(1),
        Atom::Cup => m.cup.clone(),
        Atom::Cap => m.cap.clone(),
        Atom::Over => m.rmat.clone(),
        Atom::Under => m.rmat_inv.clone(),
        Atom::Merge => m.pmap.scale(&qp(-3)),
        Atom::Split => m.gamma.scale(&qp(3).neg()),
    }
}

/// Evaluate a diagram to the exact linear map it represents.
///
/// Slices are applied atom-by-atom with [`apply_at`] rather than being
/// materialized as full row maps, so wide slices of mostly identity strands
/// stay cheap.
pub fn evaluate(d: &Diagram) -> LinMap {
    let mut acc = LinMap::identity(d.bottom());
    for slice in d.slices() {
        let values: Vec<Option<LinMap>> = slice
            .iter()
            .map(|&a| (a != Atom::Id).then(|| atom_value(a)))
            .collect();
        let out_legs: usize = slice.iter().map(|a| a.arity().1).sum();
        let cols = acc.iter_columns().map(|(idx, t)| {
            let mut t = t.clone();
            let mut off = 0usize;
            for (&a, v) in slice.iter().zip(&values) {
                match v {
                    None => off += 1,
                    Some(f) => {
                        t = apply_at(f, off, &t);
                        off += a.arity().1;
                    }
                }
            }
            (idx, t)
        });
        acc = LinMap::from_columns(acc.in_legs(), out_legs, cols.collect::<Vec<_>>());
    }
    acc
}

/// A finite linear combination of diagrams with common boundary.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinComb {
    terms: BTreeMap<Diagram, RatFunc>,
}

impl LinComb {
    pub fn zero() -> LinComb {
        LinComb {
            terms: BTreeMap::new(),
        }
    }

    pub fn single(d: Diagram, c: RatFunc) -> LinComb {
        let mut l = LinComb::zero();
        l.add_term(d, &c);
        l
    }

    pub fn add_term(&mut self, d: Diagram, c: &RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&d) {
            Some(existing) => {
                let s = existing.add(c);
                if s.is_zero() {
                    self.terms.remove(&d);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(d, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb, scale: &RatFunc) {
        for (d, c) in &other.terms {
            self.add_term(d.clone(), &c.mul(scale));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Diagram, &RatFunc)> {
        self.terms.iter()
    }

    /// Evaluate the combination.  All terms must share a boundary; the zero
    /// combination needs an explicit boundary, so it is rejected here.
    pub fn evaluate(&self) -> LinMap {
        let (first, _) = self.terms.iter().next().expect("nonempty combination");
        let mut acc = LinMap::zero(first.bottom(), first.top());
        for (d, c) in &self.terms {
            acc = acc.add(&evaluate(d).scale(c));
        }
        acc
    }
}

fn check_maps(id: &str, lhs: &LinMap, rhs: &LinMap) -> Check {
    Check::expect(id, lhs == rhs, format!("map mismatch in {}", id))
}

fn ev(src: &str) -> LinMap {
    evaluate(&Diagram::parse(src).expect("valid diagram literal"))
}

/// The defining relations of the diagram category, verified under the
/// evaluation functor: vertex/crossing exchange values, curls, bigon and
/// lollipop values, the skein relations, the η spectral decomposition, and
/// the strand-slide moves.
pub fn relation_suite() -> Vec<Check> {
    let m = structure_maps();
    let c7 = rep::seven_q_minus_one();
    let mut checks = Vec::new();

    // Planar isotopy sanity: zig-zags and the closed loop.
    checks.push(check_maps("zigzag-left", &ev("id cup ; cap id"), &LinMap::identity(1)));
    checks.push(check_maps("zigzag-right", &ev("cup id ; id cap"), &LinMap::identity(1)));
    let loop_value = ev("cup ; cap").column(&LegIndex::empty()).scalar_value();
    checks.push(Check::expect(
        "closed-loop",
        loop_value == rep::dim_q_v(),
        format!("loop = {}", loop_value),
    ));

    // Crossing–vertex exchange: sliding the crossing through a vertex
    // multiplies by −q^{∓6}.
    let vertex_scale = |id: &str, lhs: &str, rhs: &str, e: i64| {
        check_maps(id, &ev(lhs), &ev(rhs).scale(&qp(e).neg()))
    };
    checks.push(vertex_scale("tri-over-merge", "over ; merge", "merge", -6));
    checks.push(vertex_scale("tri-under-merge", "under ; merge", "merge", 6));
    checks.push(vertex_scale("tri-split-over", "split ; over", "split", -6));
    checks.push(vertex_scale("tri-split-under", "split ; under", "split", 6));

    // Curls and their cup-sided analogues.
    checks.push(check_maps(
        "curl-over",
        &ev("id cup ; over id ; id cap"),
        &LinMap::identity(1).scale(&qp(12)),
    ));
    checks.push(check_maps(
        "curl-under",
        &ev("id cup ; under id ; id cap"),
        &LinMap::identity(1).scale(&qp(-12)),
    ));
    checks.push(check_maps("polo-over", &ev("cup ; over"), &ev("cup").scale(&qp(-12))));
    checks.push(check_maps("polo-under", &ev("cup ; under"), &ev("cup").scale(&qp(12))));

    // Bigon and its open form.
    checks.push(check_maps(
        "bigon",
        &ev("split ; merge"),
        &LinMap::identity(1).scale(&c7),
    ));
    checks.push(check_maps(
        "merge-split",
        &ev("merge ; split"),
        &m.p_lambda1.scale(&c7),
    ));

    // Lollipop.
    checks.push(check_maps("lollipop-cup-merge", &ev("cup ; merge"), &LinMap::zero(0, 1)));
    checks.push(check_maps("lollipop-split-cap", &ev("split ; cap"), &LinMap::zero(1, 0)));

    // Four-term skein and its quarter-turn form.
    let over = ev("over");
    let under = ev("under");
    let id2 = LinMap::identity(2);
    let cupcap = ev("cap ; cup");
    let vertexpair = ev("merge ; split");
    let eta = ev("id split ; merge id");
    let qmq = qp(1).sub(&qp(-1)); // q − q^-1
    let q2q2 = qp(2).add(&qp(-2)); // q^2 + q^-2
    let skein = |a: &LinMap, b: &LinMap, c: &LinMap| {
        over.scale(&qp(-1)).sub(&under.scale(&qp(1))).sub(
            &a.sub(&b.scale(&q2q2)).add(c).scale(&qmq),
        )
    };
    checks.push(check_maps("skein-vertical", &skein(&id2, &cupcap, &vertexpair), &LinMap::zero(2, 2)));
    // Quarter-turn: id ↔ cup∘cap, vertexpair ↔ η, over ↔ under.
    let skein_rot = under
        .scale(&qp(-1))
        .sub(&over.scale(&qp(1)))
        .sub(&cupcap.sub(&id2.scale(&q2q2)).add(&eta).scale(&qmq));
    checks.push(check_maps("skein-horizontal", &skein_rot, &LinMap::zero(2, 2)));

    // η spectral decomposition.
    let eta_expected = m
        .p_0
        .scale(&c7)
        .sub(&m.p_2lambda1)
        .add(&m.p_lambda2.scale(&RatFunc::from_poly(crate::qint(3))))
        .sub(&m.p_lambda1.scale(&qp(4).add(&RatFunc::one()).add(&qp(-4))));
    checks.push(check_maps("eta-spectral", &eta, &eta_expected));

    // Five-term crossing resolutions.
    let qpq = qp(1).add(&qp(-1)); // q + q^-1
    let cross_lhs = over.scale(&qpq);
    let cross_rhs = id2
        .scale(&qp(3))
        .add(&cupcap.scale(&qp(-3)))
        .sub(&eta.scale(&qp(1)))
        .sub(&vertexpair.scale(&qp(-1)));
    checks.push(check_maps("cross-over", &cross_lhs, &cross_rhs));
    let crossprime_lhs = under.scale(&qpq);
    let crossprime_rhs = id2
        .scale(&qp(-3))
        .add(&cupcap.scale(&qp(3)))
        .sub(&eta.scale(&qp(-1)))
        .sub(&vertexpair.scale(&qp(1)));
    checks.push(check_maps("cross-under", &crossprime_lhs, &crossprime_rhs));

    // Strand slides across the vertex (both chiralities).
    checks.push(check_maps(
        "slide-over-merge",
        &ev("id merge ; over"),
        &ev("over id ; id over ; merge id"),
    ));
    checks.push(check_maps(
        "slide-under-merge",
        &ev("id merge ; under"),
        &ev("under id ; id under ; merge id"),
    ));

    // Yang–Baxter as diagrams.
    checks.push(check_maps(
        "yang-baxter",
        &ev("over id ; id over ; over id"),
        &ev("id over ; over id ; id over"),
    ));
    checks
}

// ---------------------------------------------------------------------------
// Webs: the combinatorial-map model behind cycle reduction
// ---------------------------------------------------------------------------

const DEAD: usize = usize::MAX;

/// Largest cycle length for which a reduction rule is computed on demand.
/// Longest ring with an acyclic replacement rule.  From length 6 on the ring
/// closure is linearly independent of the acyclic fillings (at 6 boundary
/// points they span 34 of the 35 invariant dimensions), so longer rings are
/// basis webs.
const MAX_RING: usize = 5;

#[derive(Clone, Debug)]
enum Node {
    /// Trivalent vertex; ports list incident edge ends counter-clockwise.
    Vertex([usize; 3]),
    /// Crossing; ports counter-clockwise `[BL, BR, TR, TL]`.
    Cross { ports: [usize; 4], over: bool },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Owner {
    Node { node: usize, port: u8 },
    Bottom(usize),
    Top(usize),
    /// Dangling during surgery.
    Pending,
    Dead,
}

/// A diagram as an abstract planar graph: each edge is a pair of partnered
/// ends, and each node records the counter-clockwise cyclic order of its
/// incident ends.  Closed circles with no nodes are only counted.
#[derive(Clone, Debug)]
struct Web {
    nodes: Vec<Option<Node>>,
    partner: Vec<usize>,
    owner: Vec<Owner>,
    bottom: Vec<usize>,
    top: Vec<usize>,
    free_loops: usize,
}

impl Web {
    fn empty() -> Web {
        Web {
            nodes: Vec::new(),
            partner: Vec::new(),
            owner: Vec::new(),
            bottom: Vec::new(),
            top: Vec::new(),
            free_loops: 0,
        }
    }

    fn new_end(&mut self) -> usize {
        self.partner.push(DEAD);
        self.owner.push(Owner::Pending);
        self.owner.len() - 1
    }

    fn new_edge(&mut self) -> (usize, usize) {
        let a = self.new_end();
        let b = self.new_end();
        self.partner[a] = b;
        self.partner[b] = a;
        (a, b)
    }

    fn kill(&mut self, e: usize) {
        self.partner[e] = DEAD;
        self.owner[e] = Owner::Dead;
    }

    /// Join two dangling ends, merging their edges (or closing a circle).
    fn fuse(&mut self, x: usize, y: usize) {
        debug_assert!(matches!(self.owner[x], Owner::Pending));
        debug_assert!(matches!(self.owner[y], Owner::Pending));
        let px = self.partner[x];
        let py = self.partner[y];
        if px == y {
            self.free_loops += 1;
        } else {
            self.partner[px] = py;
            self.partner[py] = px;
        }
        self.kill(x);
        self.kill(y);
    }

    fn add_vertex(&mut self, ends: [usize; 3]) -> usize {
        let v = self.nodes.len();
        for (k, &e) in ends.iter().enumerate() {
            debug_assert!(matches!(self.owner[e], Owner::Pending));
            self.owner[e] = Owner::Node {
                node: v,
                port: k as u8,
            };
        }
        self.nodes.push(Some(Node::Vertex(ends)));
        v
    }

    fn from_diagram(d: &Diagram) -> Web {
        let mut w = Web::empty();
        let mut frontier: Vec<usize> = Vec::new();
        for k in 0..d.bottom() {
            let (b, u) = w.new_edge();
            w.owner[b] = Owner::Bottom(k);
            w.bottom.push(b);
            frontier.push(u);
        }
        for slice in d.slices() {
            let mut pos = 0usize;
            let mut next: Vec<usize> = Vec::new();
            for &a in slice {
                match a {
                    Atom::Id => {
                        next.push(frontier[pos]);
                        pos += 1;
                    }
                    Atom::Cup => {
                        let (x, y) = w.new_edge();
                        next.push(x);
                        next.push(y);
                    }
                    Atom::Cap => {
                        let (x, y) = (frontier[pos], frontier[pos + 1]);
                        pos += 2;
                        w.fuse(x, y);
                    }
                    Atom::Merge => {
                        let (x, y) = (frontier[pos], frontier[pos + 1]);
                        pos += 2;
                        let (ta, tu) = w.new_edge();
                        // Counter-clockwise from the output: top, left, right.
                        w.add_vertex([ta, x, y]);
                        next.push(tu);
                    }
                    Atom::Split => {
                        let x = frontier[pos];
                        pos += 1;
                        let (tra, tru) = w.new_edge();
                        let (tla, tlu) = w.new_edge();
                        // Counter-clockwise from the input: bottom, top-right,
                        // top-left.
                        w.add_vertex([x, tra, tla]);
                        next.push(tlu);
                        next.push(tru);
                    }
                    Atom::Over | Atom::Under => {
                        let (x, y) = (frontier[pos], frontier[pos + 1]);
                        pos += 2;
                        let (tra, tru) = w.new_edge();
                        let (tla, tlu) = w.new_edge();
                        let v = w.nodes.len();
                        for (k, &e) in [x, y, tra, tla].iter().enumerate() {
                            w.owner[e] = Owner::Node {
                                node: v,
                                port: k as u8,
                            };
                        }
                        w.nodes.push(Some(Node::Cross {
                            ports: [x, y, tra, tla],
                            over: a == Atom::Over,
                        }));
                        next.push(tlu);
                        next.push(tru);
                    }
                }
            }
            frontier = next;
        }
        for (k, &u) in frontier.iter().enumerate() {
            w.owner[u] = Owner::Top(k);
            w.top.push(u);
        }
        w
    }

    fn first_crossing(&self) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| matches!(n, Some(Node::Cross { .. })))
    }

    /// Resolve one crossing into its four planar terms.
    fn expand_crossing(&self, node: usize) -> Vec<(Web, RatFunc)> {
        let (ports, over) = match &self.nodes[node] {
            Some(Node::Cross { ports, over }) => (*ports, *over),
            _ => unreachable!("expand_crossing needs a crossing node"),
        };
        let [bl, br, tr, tl] = ports;
        let mut base = self.clone();
        base.nodes[node] = None;
        for &e in &ports {
            base.owner[e] = Owner::Pending;
        }
        let inv_qpq = qp(1).add(&qp(-1)).inv().expect("q + q^-1 is nonzero");
        let (s, t) = if over { (3, 1) } else { (-3, -1) };
        // (q + q^-1)·crossing
        //   = q^{±3}·id + q^{∓3}·cupcap − q^{±1}·η − q^{∓1}·vertex pair.
        let mut out = Vec::new();
        {
            let mut w = base.clone();
            w.fuse(bl, tl);
            w.fuse(br, tr);
            out.push((w, qp(s).mul(&inv_qpq)));
        }
        {
            let mut w = base.clone();
            w.fuse(bl, br);
            w.fuse(tl, tr);
            out.push((w, qp(-s).mul(&inv_qpq)));
        }
        {
            // η: two vertices joined by a horizontal edge.
            let mut w = base.clone();
            let (ea, eb) = w.new_edge();
            w.add_vertex([bl, ea, tl]);
            w.add_vertex([br, tr, eb]);
            out.push((w, qp(t).neg().mul(&inv_qpq)));
        }
        {
            // Vertex pair: two vertices joined by a vertical edge.
            let mut w = base;
            let (ea, eb) = w.new_edge();
            w.add_vertex([ea, bl, br]);
            w.add_vertex([eb, tr, tl]);
            out.push((w, qp(-t).neg().mul(&inv_qpq)));
        }
        out
    }

    /// An edge with both ends on one vertex kills the whole term.
    fn has_self_loop(&self) -> bool {
        for n in &self.nodes {
            if let Some(Node::Vertex(ports)) = n {
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        if self.partner[ports[i]] == ports[j] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Face walk leaving along end `e0`, turning left at each vertex.  Returns
    /// the (vertex, arrival port) pairs of the face if the walk closes up as a
    /// simple cycle of distinct trivalent vertices, `None` otherwise.
    fn ring_from(&self, e0: usize) -> Option<Vec<(usize, u8)>> {
        let total = self.partner.len();
        let mut ring: Vec<(usize, u8)> = Vec::new();
        let mut e = e0;
        for _ in 0..=total {
            let f = self.partner[e];
            let (v, port) = match self.owner[f] {
                Owner::Node { node, port } => (node, port),
                _ => return None,
            };
            let ports = match &self.nodes[v] {
                Some(Node::Vertex(p)) => *p,
                _ => return None,
            };
            if ring.iter().any(|&(u, _)| u == v) {
                return None;
            }
            ring.push((v, port));
            e = ports[(port as usize + 1) % 3];
            if e == e0 {
                return if ring.len() >= 2 { Some(ring) } else { None };
            }
        }
        None
    }

    /// Find a shortest face whose boundary is a simple cycle of distinct
    /// trivalent vertices.  Innermost cycles always bound such a face, so a
    /// cyclic web always yields one.  Returns (vertex, arrival port) pairs in
    /// face order.
    fn minimal_ring(&self) -> Option<Vec<(usize, u8)>> {
        let mut best: Option<Vec<(usize, u8)>> = None;
        for e0 in 0..self.partner.len() {
            match self.owner[e0] {
                Owner::Node { node, .. } => {
                    if !matches!(self.nodes[node], Some(Node::Vertex(_))) {
                        continue;
                    }
                }
                _ => continue,
            }
            if let Some(ring) = self.ring_from(e0) {
                match &best {
                    Some(b) if b.len() <= ring.len() => {}
                    _ => best = Some(ring),
                }
            }
        }
        best
    }

    /// Remove a ring's vertices and internal edges, returning the dangling
    /// external ends in face order.
    fn cut_ring(&mut self, ring: &[(usize, u8)]) -> Vec<usize> {
        let mut ext = Vec::with_capacity(ring.len());
        for &(v, arr) in ring {
            let ports = match self.nodes[v].take() {
                Some(Node::Vertex(p)) => p,
                _ => unreachable!("ring nodes are vertices"),
            };
            let a = arr as usize;
            let e_ext = ports[(a + 2) % 3];
            self.owner[e_ext] = Owner::Pending;
            self.kill(ports[a]);
            self.kill(ports[(a + 1) % 3]);
            ext.push(e_ext);
        }
        ext
    }

    /// Walk the tree on the far side of end `e`'s edge, collecting boundary
    /// leaves in planar left-to-right order and the split-tree shape.
    fn tree_shape(&self, e: usize, leaves: &mut Vec<usize>) -> Shape {
        let f = self.partner[e];
        match self.owner[f] {
            Owner::Bottom(_) | Owner::Top(_) => {
                leaves.push(f);
                Shape::Leaf
            }
            Owner::Node { node, port } => {
                let ports = match &self.nodes[node] {
                    Some(Node::Vertex(p)) => *p,
                    _ => unreachable!("acyclic web still has a crossing"),
                };
                let p = port as usize;
                let left = self.tree_shape(ports[(p + 2) % 3], leaves);
                let right = self.tree_shape(ports[(p + 1) % 3], leaves);
                Shape::Join(Box::new(left), Box::new(right))
            }
            _ => unreachable!("walk reached a dead end"),
        }
    }

    /// Vertices of the connected component holding end `e0`, plus its count
    /// of edges with both endpoints on component vertices.
    fn component(&self, e0: usize) -> (Vec<usize>, usize) {
        let mut verts = Vec::new();
        let mut visited = vec![false; self.nodes.len()];
        let mut stack = vec![e0];
        while let Some(e) = stack.pop() {
            if let Owner::Node { node, .. } = self.owner[self.partner[e]] {
                if !visited[node] {
                    visited[node] = true;
                    verts.push(node);
                    match &self.nodes[node] {
                        Some(Node::Vertex(ports)) => stack.extend(ports.iter().copied()),
                        _ => unreachable!("layout web still has a crossing"),
                    }
                }
            }
        }
        let mut internal_ports = 0usize;
        for &v in &verts {
            if let Some(Node::Vertex(ports)) = &self.nodes[v] {
                for &p in ports {
                    if matches!(self.owner[self.partner[p]], Owner::Node { .. }) {
                        internal_ports += 1;
                    }
                }
            }
        }
        (verts, internal_ports / 2)
    }

    /// Gadget for a component with exactly one cycle: a closed ring core with
    /// each ring vertex's pendant tree applied on top.  The face walk and the
    /// ring core traverse their inner faces by the same left-turn rule, so
    /// matching them vertex for vertex preserves the planar structure; only
    /// the rotational offset remains to be fixed from the boundary order.
    fn cyclic_gadget(
        &self,
        verts: &[usize],
        position: &dyn Fn(Owner) -> usize,
    ) -> (Vec<usize>, Diagram) {
        let ring = verts
            .iter()
            .flat_map(|&v| match &self.nodes[v] {
                Some(Node::Vertex(ports)) => ports.iter().copied(),
                _ => unreachable!("cyclic component nodes are vertices"),
            })
            .find_map(|e| self.ring_from(e))
            .expect("component with a cycle has a simple inner face");
        let r = ring.len();
        let mut trees: Vec<(Shape, Vec<usize>)> = Vec::with_capacity(r);
        for &(v, arr) in &ring {
            let ports = match &self.nodes[v] {
                Some(Node::Vertex(p)) => *p,
                _ => unreachable!("ring nodes are vertices"),
            };
            let ext = ports[(arr as usize + 2) % 3];
            let mut leaf_ends = Vec::new();
            let shape = self.tree_shape(ext, &mut leaf_ends);
            let leaf_pos = leaf_ends
                .iter()
                .map(|&e| position(self.owner[e]))
                .collect();
            trees.push((shape, leaf_pos));
        }
        let seq: Vec<usize> = trees.iter().flat_map(|t| t.1.iter().copied()).collect();
        let total = seq.len();
        let mut positions = seq.clone();
        positions.sort_unstable();
        // The boundary order is the same cyclic sequence as the walk order;
        // find the rotation aligning them.  (A nonzero rotation means one
        // pendant tree wraps around the ring to reach both flanks.)
        let shift = (0..total)
            .find(|&s| (0..total).all(|i| seq[(total - s + i) % total] == positions[i]))
            .expect("cyclic component has a planar rotation");
        let mut tops = Diagram::identity(0);
        for (shape, _) in &trees {
            tops = tops.tensor(&shape_diagram(shape));
        }
        let mut gadget = ring_core(r).then(&tops);
        // Wrap the trailing leg to the front: route it beneath the gadget
        // with a cup on the left closed by a cap on the right.
        for _ in 0..shift {
            let inner = Diagram::identity(1).tensor(&gadget).tensor(&Diagram::identity(1));
            let mut cap = vec![Atom::Id; total];
            cap.push(Atom::Cap);
            gadget = Diagram::atom(Atom::Cup)
                .then(&inner)
                .then(&Diagram::new(vec![cap]).expect("cap slice composes"));
        }
        (positions, gadget)
    }

    /// Lay out a crossing-free web as a slice diagram: bend the bottom
    /// boundary up with a nested cap rainbow, emit each component
    /// outermost-first as a cup-rooted gadget, then close the rainbow.  Tree
    /// components become a cup followed by splits; a component carrying an
    /// (irreducible) cycle becomes a closed ring core with its pendant trees
    /// on top.  At most one cycle per component is supported, which covers
    /// every web the reducer can emit.
    fn layout(&self) -> Diagram {
        assert_eq!(self.free_loops, 0, "free loops must be removed first");
        let k = self.bottom.len();
        let l = self.top.len();
        let m = k + l;
        if m == 0 {
            assert!(
                self.nodes.iter().all(|n| n.is_none()),
                "closed web left unreduced in layout"
            );
            return Diagram::identity(0);
        }
        // Position on the bent all-legs-up boundary line.
        let position = |o: Owner| -> usize {
            match o {
                Owner::Bottom(j) => k - 1 - j,
                Owner::Top(j) => k + j,
                _ => unreachable!("leaf is not a boundary end"),
            }
        };
        let mut end_at = vec![0usize; m];
        for (j, &e) in self.bottom.iter().enumerate() {
            end_at[k - 1 - j] = e;
        }
        for (j, &e) in self.top.iter().enumerate() {
            end_at[k + j] = e;
        }
        let mut seen = vec![false; m];
        let mut comps: Vec<(Vec<usize>, Diagram)> = Vec::new();
        for root_pos in 0..m {
            if seen[root_pos] {
                continue;
            }
            let (verts, internal_edges) = self.component(end_at[root_pos]);
            let (positions, gadget) = if verts.is_empty() || internal_edges < verts.len() {
                // Tree component: a cup whose right strand carries the splits.
                let mut leaf_ends = Vec::new();
                let shape = self.tree_shape(end_at[root_pos], &mut leaf_ends);
                let mut positions = vec![root_pos];
                positions.extend(leaf_ends.iter().map(|&e| position(self.owner[e])));
                let gadget = Diagram::atom(Atom::Cup)
                    .then(&Diagram::identity(1).tensor(&shape_diagram(&shape)));
                (positions, gadget)
            } else {
                assert_eq!(
                    internal_edges,
                    verts.len(),
                    "layout supports at most one cycle per component"
                );
                self.cyclic_gadget(&verts, &position)
            };
            for w in positions.windows(2) {
                assert!(w[0] < w[1], "component leaves out of planar order");
            }
            for &p in &positions {
                seen[p] = true;
            }
            comps.push((positions, gadget));
        }
        comps.sort_by_key(|(pos, _)| pos[0]);
        let mut slices: Vec<Vec<Atom>> = Vec::new();
        let mut placed = vec![false; m];
        // Bent positions 0..capped are already closed against their bottom
        // strands; capping as early as possible keeps intermediate slices
        // narrow.
        let mut capped = 0usize;
        for (pos, dc) in &comps {
            let insert_at = (capped..pos[0]).filter(|&p| placed[p]).count();
            assert!(
                (pos[0]..*pos.last().unwrap())
                    .all(|p| pos.contains(&p) || !placed[p]),
                "component interleaves an already placed one"
            );
            let uncapped_placed = (capped..m).filter(|&p| placed[p]).count();
            let width = (k - capped) + uncapped_placed;
            let left = (k - capped) + insert_at;
            for row in dc.slices() {
                let mut slice = vec![Atom::Id; left];
                slice.extend(row.iter().copied());
                slice.extend(std::iter::repeat(Atom::Id).take(width - left));
                slices.push(slice);
            }
            for &p in pos {
                placed[p] = true;
            }
            // Fire every rainbow cap whose bent position is now available.
            while capped < k && placed[capped] {
                let width_before =
                    (k - capped) + (capped..m).filter(|&p| placed[p]).count();
                let mut slice = vec![Atom::Id; k - capped - 1];
                slice.push(Atom::Cap);
                slice.extend(std::iter::repeat(Atom::Id).take(width_before - (k - capped) - 1));
                slices.push(slice);
                capped += 1;
            }
        }
        assert_eq!(capped, k, "every bent bottom strand must be capped");
        if slices.is_empty() {
            return Diagram::identity(k);
        }
        Diagram::new(slices).expect("layout slices compose")
    }
}

// ---------------------------------------------------------------------------
// Acyclic patches and the cycle reduction rule
// ---------------------------------------------------------------------------

/// A planar binary tree over consecutive leaves, built from splits.
#[derive(Clone, Debug)]
enum Shape {
    Leaf,
    Join(Box<Shape>, Box<Shape>),
}

impl Shape {
    fn leaves(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Join(a, b) => a.leaves() + b.leaves(),
        }
    }
}

fn shape_diagram(s: &Shape) -> Diagram {
    match s {
        Shape::Leaf => Diagram::identity(1),
        Shape::Join(a, b) => {
            Diagram::atom(Atom::Split).then(&shape_diagram(a).tensor(&shape_diagram(b)))
        }
    }
}

fn shape_map(s: &Shape) -> LinMap {
    match s {
        Shape::Leaf => LinMap::identity(1),
        Shape::Join(a, b) => shape_map(a)
            .tensor(&shape_map(b))
            .compose(&atom_value(Atom::Split)),
    }
}

/// A crossing-free, cycle-free filling of a disk with `n` boundary legs: a
/// non-crossing partition into blocks of size ≥ 2, each block realized as a
/// cup whose right strand carries a split tree.
#[derive(Clone, Debug)]
struct Patch {
    /// Per block: ascending leg positions and the tree over all but the first.
    blocks: Vec<(Vec<usize>, Shape)>,
}

fn shapes(m: usize) -> Vec<Shape> {
    if m == 1 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for k in 1..m {
        for a in shapes(k) {
            for b in shapes(m - k) {
                out.push(Shape::Join(Box::new(a.clone()), Box::new(b.clone())));
            }
        }
    }
    out
}

/// Non-crossing partitions of `points` into blocks of size ≥ 2.
fn noncrossing_partitions(points: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let first = points[0];
    let rest = &points[1..];
    let m = rest.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let chosen: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let mut block = vec![first];
        block.extend(chosen.iter().map(|&i| rest[i]));
        let mut segments: Vec<&[usize]> = Vec::new();
        let mut prev = 0usize;
        for &i in &chosen {
            segments.push(&rest[prev..i]);
            prev = i + 1;
        }
        segments.push(&rest[prev..]);
        let mut acc: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for seg in segments {
            let subs = noncrossing_partitions(seg);
            let mut next = Vec::with_capacity(acc.len() * subs.len());
            for pre in &acc {
                for sub in &subs {
                    let mut v = pre.clone();
                    v.extend(sub.iter().cloned());
                    next.push(v);
                }
            }
            acc = next;
        }
        out.extend(acc);
    }
    out
}

fn enumerate_patches(n: usize) -> Vec<Patch> {
    let points: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for part in noncrossing_partitions(&points) {
        let mut acc: Vec<Vec<(Vec<usize>, Shape)>> = vec![Vec::new()];
        for block in &part {
            let ss = shapes(block.len() - 1);
            let mut next = Vec::with_capacity(acc.len() * ss.len());
            for pre in &acc {
                for s in &ss {
                    let mut v = pre.clone();
                    v.push((block.clone(), s.clone()));
                    next.push(v);
                }
            }
            acc = next;
        }
        out.extend(acc.into_iter().map(|blocks| Patch { blocks }));
    }
    out
}

/// The functor value of a patch as an invariant vector in V^{⊗n}.  Entries
/// factorize over blocks because distinct blocks occupy disjoint leg sets of
/// a planar picture.
fn patch_tensor(p: &Patch, n: usize) -> SparseTensor {
    let c0 = &structure_maps().c0;
    let blocks: Vec<(&Vec<usize>, SparseTensor)> = p
        .blocks
        .iter()
        .map(|(pos, s)| (pos, apply_at(&shape_map(s), 1, c0)))
        .collect();
    fn rec(
        blocks: &[(&Vec<usize>, SparseTensor)],
        digits: &mut [u8],
        coeff: RatFunc,
        out: &mut SparseTensor,
    ) {
        match blocks.split_first() {
            None => out.add_term(LegIndex::from_digits(digits), &coeff),
            Some(((pos, t), rest)) => {
                for (idx, c) in t.iter() {
                    for (j, &p) in pos.iter().enumerate() {
                        digits[p] = idx.digit(j);
                    }
                    rec(rest, digits, coeff.mul(c), out);
                }
            }
        }
    }
    let mut out = SparseTensor::zero(n);
    let mut digits = vec![0u8; n];
    rec(&blocks, &mut digits, RatFunc::one(), &mut out);
    out
}

/// The closed `n`-cycle with all legs emitted upward, as an invariant vector:
/// a cup whose left strand is split `n` times before closing against the
/// right strand.
/// The closed `n`-ring with all legs emitted upward, as a slice diagram: the
/// diagram form of `cycle_vector`.  Leg `i` hangs off the `i`-th ring vertex,
/// and the ring's inner face is traversed by the same left-turn rule as a web
/// face walk.
fn ring_core(n: usize) -> Diagram {
    let mut slices: Vec<Vec<Atom>> = vec![vec![Atom::Cup]];
    for i in 0..n {
        let mut s = vec![Atom::Id; i];
        s.push(Atom::Split);
        s.push(Atom::Id);
        slices.push(s);
    }
    let mut s = vec![Atom::Id; n];
    s.push(Atom::Cap);
    slices.push(s);
    Diagram::new(slices).expect("ring core composes")
}

fn cycle_vector(n: usize) -> SparseTensor {
    let m = structure_maps();
    let split = atom_value(Atom::Split);
    let mut t = m.c0.clone();
    for i in 0..n {
        t = apply_at(&split, i, &t);
    }
    apply_at(&m.cap, n, &t)
}

struct RingRule {
    patches: Vec<Patch>,
    coeffs: Vec<RatFunc>,
}

/// The solved replacement of an `n`-ring by acyclic patches, cached per `n`.
/// Returns `None` when the `n`-ring closure is not in the span of acyclic
/// patches: rings of length 2..=5 always reduce, but from length 6 on the
/// ring is an independent basis web and must be kept verbatim.
fn ring_rule(n: usize) -> Option<Arc<RingRule>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Option<Arc<RingRule>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(r) = cache.lock().expect("ring-rule cache poisoned").get(&n) {
        return r.clone();
    }
    let rule = if (2..=MAX_RING).contains(&n) {
        let patches = enumerate_patches(n);
        let mut tracker = SpanTracker::new(n);
        for p in &patches {
            let t = patch_tensor(p, n);
            assert!(
                tracker.insert(&t).is_none(),
                "acyclic patches must be linearly independent"
            );
        }
        tracker
            .express(&cycle_vector(n))
            .map(|coeffs| Arc::new(RingRule { patches, coeffs }))
    } else {
        None
    };
    cache
        .lock()
        .expect("ring-rule cache poisoned")
        .entry(n)
        .or_insert(rule)
        .clone()
}

fn splice_tree(w: &mut Web, shape: &Shape, parent: usize, leaves: &[usize]) {
    match shape {
        Shape::Leaf => {
            debug_assert_eq!(leaves.len(), 1);
            w.fuse(parent, leaves[0]);
        }
        Shape::Join(a, b) => {
            let (la, lu) = w.new_edge();
            let (ra, ru) = w.new_edge();
            // Counter-clockwise: parent below, then top-right, then top-left.
            w.add_vertex([parent, ra, la]);
            let k = a.leaves();
            splice_tree(w, a, lu, &leaves[..k]);
            splice_tree(w, b, ru, &leaves[k..]);
        }
    }
}

fn splice_patch(w: &mut Web, ext: &[usize], patch: &Patch) {
    for (pos, shape) in &patch.blocks {
        let parent = ext[pos[0]];
        let leaf_ends: Vec<usize> = pos[1..].iter().map(|&i| ext[i]).collect();
        splice_tree(w, shape, parent, &leaf_ends);
    }
}

/// Rewrite a diagram into a linear combination of crossing-free trivalent
/// diagrams with the same evaluation.  Crossings are resolved first; cycles
/// are then replaced smallest-first by solved acyclic fillings.  Cycles of
/// length up to 5 always reduce, and a closed diagram always reduces to a
/// scalar (a planar trivalent graph always has a face with at most 5 sides).
/// An open diagram may leave cycles of length ≥ 6 in the output: a hexagonal
/// web is linearly independent of the acyclic diagrams on the same boundary,
/// so such terms are emitted verbatim as basis webs.
pub fn reduce_to_acyclic(d: &Diagram) -> LinComb {
    let mut work: Vec<(Web, RatFunc)> = vec![(Web::from_diagram(d), RatFunc::one())];
    let mut out = LinComb::zero();
    while let Some((mut w, mut c)) = work.pop() {
        if let Some(x) = w.first_crossing() {
            for (w2, c2) in w.expand_crossing(x) {
                work.push((w2, c.mul(&c2)));
            }
            continue;
        }
        while w.free_loops > 0 {
            c = c.mul(&rep::dim_q_v());
            w.free_loops -= 1;
        }
        if w.has_self_loop() {
            continue;
        }
        if let Some(ring) = w.minimal_ring() {
            if let Some(rule) = ring_rule(ring.len()) {
                let ext = w.cut_ring(&ring);
                for (patch, pc) in rule.patches.iter().zip(&rule.coeffs) {
                    if pc.is_zero() {
                        continue;
                    }
                    let mut w2 = w.clone();
                    splice_patch(&mut w2, &ext, patch);
                    work.push((w2, c.mul(pc)));
                }
                continue;
            }
            // Irreducible minimal ring: every remaining cycle has length ≥ 6,
            // so the web is a basis web and is emitted as-is.
        }
        out.add_term(w.layout(), &c);
    }
    out
}

/// Is a reduction of `d` crossing-free and evaluation-preserving?
fn reduction_sound(d: &Diagram) -> bool {
    let r = reduce_to_acyclic(d);
    let reduced_eval = if r.is_zero() {
        LinMap::zero(d.bottom(), d.top())
    } else {
        r.evaluate()
    };
    reduced_eval == evaluate(d)
        && r.iter().all(|(t, _)| {
            t.slices()
                .iter()
                .all(|row| row.iter().all(|a| !matches!(a, Atom::Over | Atom::Under)))
        })
}

/// The cycle-reduction suite: closed loop, bigon, triangle and square
/// replacement coefficients, plus `samples` deterministic pseudo-random
/// diagrams checked for evaluation-preserving, crossing-free reductions.
pub fn reduction_suite(samples: usize) -> Vec<Check> {
    let mut checks = Vec::new();

    let r = reduce_to_acyclic(&Diagram::parse("cup ; cap").expect("literal parses"));
    let ok = r.num_terms() == 1
        && r.iter()
            .all(|(t, c)| t == &Diagram::identity(0) && c == &rep::dim_q_v());
    checks.push(Check::expect("loop-coefficient", ok, "closed loop reduction"));

    let r = reduce_to_acyclic(&Diagram::parse("split ; merge").expect("literal parses"));
    let ok = r.num_terms() == 1
        && r.iter()
            .all(|(t, c)| c == &rep::seven_q_minus_one() && evaluate(t) == LinMap::identity(1));
    checks.push(Check::expect("bigon-coefficient", ok, "bigon reduction"));

    let d = Diagram::parse("split ; split id ; id merge").expect("literal parses");
    let r = reduce_to_acyclic(&d);
    let tri = qp(4).add(&RatFunc::one()).add(&qp(-4)).neg();
    let ok = r.num_terms() == 1
        && r.iter()
            .all(|(t, c)| c == &tri && evaluate(t) == evaluate(&Diagram::atom(Atom::Split)));
    checks.push(Check::expect("triangle-coefficient", ok, "triangle reduction"));

    let d = Diagram::parse("split id ; id merge ; split split ; id cap id").expect("literal parses");
    let r = reduce_to_acyclic(&d);
    let b = qp(2).add(&RatFunc::one()).add(&qp(-2));
    let s = qp(2).add(&qp(-2));
    let mut coeffs: Vec<String> = r.iter().map(|(_, c)| c.to_string()).collect();
    let mut expected = vec![b.to_string(), b.to_string(), s.to_string(), s.to_string()];
    coeffs.sort();
    expected.sort();
    checks.push(Check::expect(
        "square-coefficients",
        r.num_terms() == 4 && coeffs == expected && reduction_sound(&d),
        "square reduction",
    ));

    // The open hexagonal web is independent of the 34 acyclic diagrams on 6
    // boundary points (the invariant space there is 35-dimensional), so it
    // must survive reduction as its own basis web.
    let hex = ring_core(6);
    let r = reduce_to_acyclic(&hex);
    let ok = reduction_sound(&hex)
        && r.num_terms() == 1
        && r.iter()
            .all(|(t, c)| c.is_one() && Web::from_diagram(t).minimal_ring().is_some());
    checks.push(Check::expect(
        "hexagon-web",
        ok,
        "hexagonal webs are basis elements and must be kept",
    ));

    let mut state = 0xC0FFEEu64;
    for k in 0..samples {
        let d = random_diagram(&mut state);
        checks.push(Check::expect(
            format!("random-{k}"),
            reduction_sound(&d),
            format!("unsound reduction of {d}"),
        ));
    }
    checks
}

pub(crate) fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic pseudo-random diagram with bounded width, atom count and
/// crossing count, suitable for randomized soundness suites.
pub fn random_diagram(state: &mut u64) -> Diagram {
    const MAX_ATOMS: usize = 12;
    const MAX_WIDTH: usize = 6;
    const MAX_CROSS: usize = 2;
    const MAX_VERTS: usize = 6;
    let mut slices: Vec<Vec<Atom>> = Vec::new();
    let mut width = (splitmix(state) % 4) as usize;
    let start_width = width;
    let n_slices = 1 + (splitmix(state) % 4) as usize;
    let mut atoms = 0usize;
    let mut crossings = 0usize;
    let mut verts = 0usize;
    for _ in 0..n_slices {
        if atoms >= MAX_ATOMS {
            break;
        }
        let mut row: Vec<Atom> = Vec::new();
        let mut rem = width;
        let mut out_w = 0usize;
        while rem > 0 || row.is_empty() {
            let mut opts: Vec<Atom> = Vec::new();
            if rem >= 1 {
                opts.push(Atom::Id);
            }
            if atoms < MAX_ATOMS {
                if rem >= 2 {
                    opts.push(Atom::Cap);
                }
                if rem >= 2 && verts < MAX_VERTS {
                    opts.push(Atom::Merge);
                }
                if rem >= 1 && verts < MAX_VERTS && out_w + 1 + rem < MAX_WIDTH {
                    opts.push(Atom::Split);
                }
                if rem >= 2 && crossings < MAX_CROSS {
                    opts.push(Atom::Over);
                    opts.push(Atom::Under);
                }
                if out_w + 2 + rem <= MAX_WIDTH {
                    opts.push(Atom::Cup);
                }
            }
            if opts.is_empty() {
                break;
            }
            let a = opts[(splitmix(state) as usize) % opts.len()];
            let (ins, outs) = a.arity();
            rem -= ins;
            out_w += outs;
            atoms += 1;
            match a {
                Atom::Merge | Atom::Split => verts += 1,
                Atom::Over | Atom::Under => crossings += 1,
                _ => {}
            }
            row.push(a);
        }
        if row.is_empty() {
            break;
        }
        width = out_w;
        slices.push(row);
    }
    if slices.is_empty() {
        return Diagram::identity(start_width);
    }
    Diagram::new(slices).expect("generated slices compose")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::all_pass;
    use crate::tensorla::pow7;

    #[test]
    fn parse_and_print_roundtrip() {
        for src in ["cup", "cup ; id id", "id cup ; over id ; id cap", "merge ; split"] {
            let d = Diagram::parse(src).expect("parses");
            assert_eq!(d.to_string(), src);
            assert_eq!(Diagram::parse(&d.to_string()).expect("reparses"), d);
        }
        // Whitespace-insensitive.
        let d = Diagram::parse("  cup;id   id ").expect("parses");
        assert_eq!(d.to_string(), "cup ; id id");
        assert_eq!(d.bottom(), 0);
        assert_eq!(d.top(), 2);
    }

    #[test]
    fn parse_errors() {
        match Diagram::parse("cup ; frob") {
            Err(DiagramError::Syntax { column, token }) => {
                assert_eq!(column, 6);
                assert_eq!(token, "frob");
            }
            other => panic!("expected syntax error, got {:?}", other),
        }
        match Diagram::parse("cup ; id") {
            Err(DiagramError::Width {
                slice,
                expected,
                found,
            }) => {
                assert_eq!((slice, expected, found), (1, 2, 1));
            }
            other => panic!("expected width error, got {:?}", other),
        }
        assert!(matches!(
            Diagram::parse("cup ; ; id id"),
            Err(DiagramError::EmptySlice { slice: 1 })
        ));
    }

    #[test]
    fn evaluate_matches_structure_maps() {
        let m = structure_maps();
        assert_eq!(ev("cup"), m.cup);
        assert_eq!(ev("cap"), m.cap);
        assert_eq!(ev("over"), m.rmat);
        assert_eq!(ev("under"), m.rmat_inv);
        assert_eq!(ev("cup ; id id"), m.cup);
        // The cup followed by a cap is the quantum dimension.
        assert_eq!(
            ev("cup ; cap").column(&LegIndex::empty()).scalar_value(),
            rep::dim_q_v()
        );
        // merge ; split against the λ1 projector.
        assert_eq!(ev("merge ; split"), m.p_lambda1.scale(&rep::seven_q_minus_one()));
    }

    #[test]
    fn evaluate_is_monoidal() {
        let a = Diagram::parse("split ; merge").unwrap();
        let b = Diagram::parse("cup ; over").unwrap();
        assert_eq!(
            evaluate(&a.tensor(&b)),
            evaluate(&a).tensor(&evaluate(&b))
        );
        let c = Diagram::parse("merge").unwrap();
        assert_eq!(
            evaluate(&b.then(&c)),
            evaluate(&c).compose(&evaluate(&b))
        );
    }

    #[test]
    fn lincomb_arithmetic() {
        let d1 = Diagram::parse("id id").unwrap();
        let d2 = Diagram::parse("cap ; cup").unwrap();
        let mut l = LinComb::zero();
        l.add_term(d1.clone(), &RatFunc::q_pow(2));
        l.add_term(d2.clone(), &RatFunc::one());
        l.add_term(d1.clone(), &RatFunc::q_pow(2).neg());
        assert_eq!(l.num_terms(), 1);
        assert_eq!(l.evaluate(), evaluate(&d2));
        assert_eq!(pow7(0), 1);
    }

    fn eval_comb(c: &LinComb, bottom: usize, top: usize) -> LinMap {
        if c.is_zero() {
            LinMap::zero(bottom, top)
        } else {
            c.evaluate()
        }
    }

    fn assert_reduction_sound(d: &Diagram) {
        let r = reduce_to_acyclic(d);
        assert_eq!(
            eval_comb(&r, d.bottom(), d.top()),
            evaluate(d),
            "reduction changed the evaluation of {}",
            d
        );
        for (t, _) in r.iter() {
            assert!(
                t.slices()
                    .iter()
                    .all(|row| row.iter().all(|a| !matches!(a, Atom::Over | Atom::Under))),
                "reduced term still has a crossing: {}",
                t
            );
        }
    }

    #[test]
    fn patch_counts_match_invariant_dimensions() {
        assert_eq!(enumerate_patches(2).len(), 1);
        assert_eq!(enumerate_patches(3).len(), 1);
        assert_eq!(enumerate_patches(4).len(), 4);
        assert_eq!(enumerate_patches(5).len(), 10);
    }

    #[test]
    fn reduce_acyclic_inputs_roundtrip() {
        for src in [
            "merge",
            "split",
            "cup",
            "cap",
            "id id",
            "id cup ; merge id",
            "split id ; id cap",
            "cup ; id split",
            "merge ; split",
        ] {
            assert_reduction_sound(&Diagram::parse(src).expect("literal parses"));
        }
    }

    #[test]
    fn reduce_closed_loop_and_bigon() {
        let r = reduce_to_acyclic(&Diagram::parse("cup ; cap").unwrap());
        assert_eq!(r.num_terms(), 1);
        let (t, c) = r.iter().next().unwrap();
        assert_eq!(t, &Diagram::identity(0));
        assert_eq!(c, &rep::dim_q_v());

        let r = reduce_to_acyclic(&Diagram::parse("split ; merge").unwrap());
        assert_eq!(r.num_terms(), 1);
        let (t, c) = r.iter().next().unwrap();
        assert_eq!(c, &rep::seven_q_minus_one());
        assert_eq!(evaluate(t), LinMap::identity(1));
    }

    #[test]
    fn reduce_triangle() {
        let d = Diagram::parse("split ; split id ; id merge").unwrap();
        let r = reduce_to_acyclic(&d);
        assert_eq!(r.num_terms(), 1);
        let (t, c) = r.iter().next().unwrap();
        let expected = qp(4).add(&RatFunc::one()).add(&qp(-4)).neg();
        assert_eq!(c, &expected);
        assert_eq!(evaluate(t), evaluate(&Diagram::atom(Atom::Split)));
        assert_reduction_sound(&d);
    }

    #[test]
    fn reduce_square() {
        let d = Diagram::parse("split id ; id merge ; split split ; id cap id").unwrap();
        let r = reduce_to_acyclic(&d);
        assert_eq!(r.num_terms(), 4);
        let b = qp(2).add(&RatFunc::one()).add(&qp(-2));
        let s = qp(2).add(&qp(-2));
        let mut coeffs: Vec<RatFunc> = r.iter().map(|(_, c)| c.clone()).collect();
        let mut expected = vec![b.clone(), b, s.clone(), s];
        coeffs.sort_by_key(|c| c.to_string());
        expected.sort_by_key(|c| c.to_string());
        assert_eq!(coeffs, expected);
        assert_reduction_sound(&d);
    }

    #[test]
    fn reduce_pentagon() {
        // An asymmetric 5-ring; catches orientation mistakes that the
        // symmetric bigon/triangle/square cases cannot.
        let d = Diagram::parse("split id ; id merge ; split split ; id merge id").unwrap();
        assert_reduction_sound(&d);
    }

    #[test]
    fn reduce_crossings() {
        for src in ["over", "under", "over ; under", "id cup ; over id ; id cap"] {
            assert_reduction_sound(&Diagram::parse(src).expect("literal parses"));
        }
    }

    #[test]
    fn reduce_random_soundness() {
        let mut state = 0xC0FFEEu64;
        for _ in 0..40 {
            let d = random_diagram(&mut state);
            assert_reduction_sound(&d);
        }
    }

    #[test]
    fn relation_suite_passes() {
        let checks = relation_suite();
        assert!(
            all_pass(&checks),
            "failures: {:?}",
            checks.iter().filter(|c| !c.pass).collect::<Vec<_>>()
        );
    }
}

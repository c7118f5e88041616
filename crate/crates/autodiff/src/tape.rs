//! Tape-based reverse-mode differentiation.
//!
//! A [`Tape`] records every primitive operation as it executes, and a [`Var`]
//! is a cheap copyable handle to one recorded value. Operands necessarily
//! exist before the operations that consume them, so record order is already
//! a topological order and [`Var::backward`] walks the tape once in reverse.
//!
//! Conventions:
//!
//! * tensors are dense row-major `f64` arrays; matrices are 2-D with the
//!   batch dimension first, and full reductions produce 0-D scalars;
//! * a tape is single-threaded and lives for one forward/backward pass —
//!   create a fresh tape per batch instead of reusing one;
//! * gradients accumulate additively across fan-out; after `backward` they
//!   are retained on gradient-requiring leaves, while intermediate buffers
//!   are released as soon as they have been fully propagated;
//! * `relu'(0) := 0`, `d|x|/dx` at 0 `:= 0`, and `sigmoid` uses the
//!   numerically stable two-branch evaluation.

use std::cell::{Cell, RefCell};

use ndarray::{concatenate, ArrayD, Axis, Ix2, Slice, Zip};

use crate::error::AutodiffError;

/// One recorded primitive. Payloads are the tape indices of the operands.
#[derive(Debug, Clone, Copy)]
enum Op {
    /// Input tensor; owns no backward rule.
    Leaf,
    /// `A · B`.
    MatMul(usize, usize),
    /// `A · Bᵀ` — the natural layout for row-major batches against
    /// `(out, in)`-shaped weight matrices.
    MatMulNt(usize, usize),
    /// Elementwise sum of identically shaped tensors.
    Add(usize, usize),
    /// Elementwise difference of identically shaped tensors.
    Sub(usize, usize),
    /// Elementwise (Hadamard) product of identically shaped tensors.
    Mul(usize, usize),
    /// Adds a `(1, n)` row to every row of an `(m, n)` matrix.
    AddRow(usize, usize),
    Sigmoid(usize),
    Tanh(usize),
    Relu(usize),
    Abs(usize),
    Square(usize),
    /// Full reduction to a 0-D scalar.
    Sum(usize),
    /// Full reduction to a 0-D scalar, divided by the element count.
    Mean(usize),
    /// Elementwise `scale · x + shift`; only the scale matters in reverse.
    ScaleShift { p: usize, scale: f64 },
    /// Contiguous column block of a matrix.
    SliceCols { p: usize, start: usize, end: usize },
    /// Horizontal concatenation `[A | B]` of matrices with equal row counts.
    ConcatCols(usize, usize),
}

#[derive(Debug)]
struct Node {
    value: ArrayD<f64>,
    grad: Option<ArrayD<f64>>,
    op: Op,
    requires_grad: bool,
}

/// Records a single forward pass and differentiates it once in reverse.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
    spent: Cell<bool>,
}

/// Handle to a tensor recorded on a [`Tape`].
#[derive(Debug, Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    idx: usize,
}

impl Tape {
    /// Creates an empty tape.
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of recorded nodes.
    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    /// True when nothing has been recorded yet.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True once `backward` has run.
    pub fn is_spent(&self) -> bool {
        self.spent.get()
    }

    /// Clears the tape for reuse. Requires exclusive access, so every
    /// outstanding [`Var`] must have been dropped first.
    pub fn reset(&mut self) {
        self.nodes.get_mut().clear();
        self.spent.set(false);
    }

    /// Records a constant input (no gradient will be accumulated).
    pub fn leaf(&self, value: ArrayD<f64>) -> Result<Var<'_>, AutodiffError> {
        self.input(value, false)
    }

    /// Records a differentiable input; `backward` fills its gradient.
    pub fn param(&self, value: ArrayD<f64>) -> Result<Var<'_>, AutodiffError> {
        self.input(value, true)
    }

    /// Records a 0-D constant scalar.
    pub fn scalar_leaf(&self, value: f64) -> Var<'_> {
        self.push(ArrayD::from_elem(ndarray::IxDyn(&[]), value), Op::Leaf, false)
    }

    fn input(&self, value: ArrayD<f64>, requires_grad: bool) -> Result<Var<'_>, AutodiffError> {
        if value.is_empty() {
            return Err(AutodiffError::EmptyTensor);
        }
        Ok(self.push(value, Op::Leaf, requires_grad))
    }

    fn push(&self, value: ArrayD<f64>, op: Op, requires_grad: bool) -> Var<'_> {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node {
            value,
            grad: None,
            op,
            requires_grad,
        });
        Var {
            tape: self,
            idx: nodes.len() - 1,
        }
    }
}

/// `A · B` on 2-D views of dynamic arrays.
fn mm(a: &ArrayD<f64>, b: &ArrayD<f64>) -> ArrayD<f64> {
    let av = a.view().into_dimensionality::<Ix2>().expect("2-D lhs");
    let bv = b.view().into_dimensionality::<Ix2>().expect("2-D rhs");
    av.dot(&bv).into_dyn()
}

/// `A · Bᵀ`.
fn mm_nt(a: &ArrayD<f64>, b: &ArrayD<f64>) -> ArrayD<f64> {
    let av = a.view().into_dimensionality::<Ix2>().expect("2-D lhs");
    let bv = b.view().into_dimensionality::<Ix2>().expect("2-D rhs");
    av.dot(&bv.t()).into_dyn()
}

/// `Aᵀ · B`.
fn mm_tn(a: &ArrayD<f64>, b: &ArrayD<f64>) -> ArrayD<f64> {
    let av = a.view().into_dimensionality::<Ix2>().expect("2-D lhs");
    let bv = b.view().into_dimensionality::<Ix2>().expect("2-D rhs");
    av.t().dot(&bv).into_dyn()
}

/// Numerically stable logistic function.
fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Adds `contrib` into the node's gradient accumulator, allocating on first
/// touch. No-op for nodes that do not require gradients.
fn accumulate(node: &mut Node, contrib: ArrayD<f64>) {
    if !node.requires_grad {
        return;
    }
    match node.grad.as_mut() {
        Some(g) => *g += &contrib,
        None => node.grad = Some(contrib),
    }
}

/// Gradient accumulator of a node, zero-initialized on first access.
fn grad_slot(node: &mut Node) -> &mut ArrayD<f64> {
    if node.grad.is_none() {
        node.grad = Some(ArrayD::zeros(node.value.raw_dim()));
    }
    node.grad.as_mut().expect("just initialized")
}

impl<'t> Var<'t> {
    /// Clone of the stored tensor.
    pub fn value(&self) -> ArrayD<f64> {
        self.tape.nodes.borrow()[self.idx].value.clone()
    }

    /// The single element of a scalar tensor.
    ///
    /// # Panics
    /// If the tensor has more than one element.
    pub fn scalar(&self) -> f64 {
        let nodes = self.tape.nodes.borrow();
        let v = &nodes[self.idx].value;
        assert_eq!(v.len(), 1, "scalar() called on a {:?} tensor", v.shape());
        *v.iter().next().expect("non-empty by construction")
    }

    /// Shape of the stored tensor.
    pub fn shape(&self) -> Vec<usize> {
        self.tape.nodes.borrow()[self.idx].value.shape().to_vec()
    }

    /// True when gradients flow into this node.
    pub fn requires_grad(&self) -> bool {
        self.tape.nodes.borrow()[self.idx].requires_grad
    }

    /// Accumulated gradient, available on gradient-requiring leaves after
    /// `backward`. `None` before `backward`, on constants, and on interior
    /// nodes (their buffers are released during the reverse sweep).
    pub fn grad(&self) -> Option<ArrayD<f64>> {
        self.tape.nodes.borrow()[self.idx].grad.clone()
    }

    fn same_tape(&self, rhs: Var<'t>) -> Result<(), AutodiffError> {
        if std::ptr::eq(self.tape, rhs.tape) {
            Ok(())
        } else {
            Err(AutodiffError::MixedTapes)
        }
    }

    fn unary(
        &self,
        op: impl FnOnce(usize) -> Op,
        f: impl Fn(f64) -> f64,
    ) -> Var<'t> {
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let n = &nodes[self.idx];
            (n.value.mapv(&f), n.requires_grad)
        };
        self.tape.push(value, op(self.idx), rg)
    }

    fn binary_elementwise(
        &self,
        rhs: Var<'t>,
        name: &'static str,
        op: impl FnOnce(usize, usize) -> Op,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Var<'t>, AutodiffError> {
        self.same_tape(rhs)?;
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let (a, b) = (&nodes[self.idx], &nodes[rhs.idx]);
            if a.value.shape() != b.value.shape() {
                return Err(AutodiffError::ShapeMismatch {
                    op: name,
                    lhs: a.value.shape().to_vec(),
                    rhs: b.value.shape().to_vec(),
                });
            }
            let value = Zip::from(&a.value)
                .and(&b.value)
                .map_collect(|&x, &y| f(x, y));
            (value, a.requires_grad || b.requires_grad)
        };
        Ok(self.tape.push(value, op(self.idx, rhs.idx), rg))
    }

    fn matmul_impl(
        &self,
        rhs: Var<'t>,
        name: &'static str,
        transpose_rhs: bool,
    ) -> Result<Var<'t>, AutodiffError> {
        self.same_tape(rhs)?;
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let (a, b) = (&nodes[self.idx], &nodes[rhs.idx]);
            let (sa, sb) = (a.value.shape(), b.value.shape());
            if sa.len() != 2 {
                return Err(AutodiffError::NotAMatrix {
                    op: name,
                    shape: sa.to_vec(),
                });
            }
            if sb.len() != 2 {
                return Err(AutodiffError::NotAMatrix {
                    op: name,
                    shape: sb.to_vec(),
                });
            }
            let inner_rhs = if transpose_rhs { sb[1] } else { sb[0] };
            if sa[1] != inner_rhs {
                return Err(AutodiffError::ShapeMismatch {
                    op: name,
                    lhs: sa.to_vec(),
                    rhs: sb.to_vec(),
                });
            }
            let value = if transpose_rhs {
                mm_nt(&a.value, &b.value)
            } else {
                mm(&a.value, &b.value)
            };
            (value, a.requires_grad || b.requires_grad)
        };
        let op = if transpose_rhs {
            Op::MatMulNt(self.idx, rhs.idx)
        } else {
            Op::MatMul(self.idx, rhs.idx)
        };
        Ok(self.tape.push(value, op, rg))
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: Var<'t>) -> Result<Var<'t>, AutodiffError> {
        self.matmul_impl(rhs, "matmul", false)
    }

    /// Matrix product `self · rhsᵀ`.
    pub fn matmul_nt(&self, rhs: Var<'t>) -> Result<Var<'t>, AutodiffError> {
        self.matmul_impl(rhs, "matmul_nt", true)
    }

    /// Elementwise sum.
    pub fn add(&self, rhs: Var<'t>) -> Result<Var<'t>, AutodiffError> {
        self.binary_elementwise(rhs, "add", Op::Add, |x, y| x + y)
    }

    /// Elementwise difference.
    pub fn sub(&self, rhs: Var<'t>) -> Result<Var<'t>, AutodiffError> {
        self.binary_elementwise(rhs, "sub", Op::Sub, |x, y| x - y)
    }

    /// Elementwise product.
    pub fn mul(&self, rhs: Var<'t>) -> Result<Var<'t>, AutodiffError> {
        self.binary_elementwise(rhs, "mul", Op::Mul, |x, y| x * y)
    }

    /// Adds a `(1, n)` row vector to every row of an `(m, n)` matrix.
    pub fn add_row(&self, row: Var<'t>) -> Result<Var<'t>, AutodiffError> {
        self.same_tape(row)?;
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let (a, r) = (&nodes[self.idx], &nodes[row.idx]);
            let (sa, sr) = (a.value.shape(), r.value.shape());
            if sa.len() != 2 {
                return Err(AutodiffError::NotAMatrix {
                    op: "add_row",
                    shape: sa.to_vec(),
                });
            }
            if sr.len() != 2 || sr[0] != 1 || sr[1] != sa[1] {
                return Err(AutodiffError::ShapeMismatch {
                    op: "add_row",
                    lhs: sa.to_vec(),
                    rhs: sr.to_vec(),
                });
            }
            (&a.value + &r.value, a.requires_grad || r.requires_grad)
        };
        Ok(self
            .tape
            .push(value, Op::AddRow(self.idx, row.idx), rg))
    }

    /// Elementwise logistic function.
    pub fn sigmoid(&self) -> Var<'t> {
        self.unary(Op::Sigmoid, sigmoid_scalar)
    }

    /// Elementwise hyperbolic tangent.
    pub fn tanh(&self) -> Var<'t> {
        self.unary(Op::Tanh, f64::tanh)
    }

    /// Elementwise rectifier, with `relu'(0) := 0`.
    pub fn relu(&self) -> Var<'t> {
        self.unary(Op::Relu, |x| x.max(0.0))
    }

    /// Elementwise absolute value, with zero subgradient at 0.
    pub fn abs(&self) -> Var<'t> {
        self.unary(Op::Abs, f64::abs)
    }

    /// Elementwise square.
    pub fn square(&self) -> Var<'t> {
        self.unary(Op::Square, |x| x * x)
    }

    /// Elementwise `scale · x + shift`.
    pub fn scale_shift(&self, scale: f64, shift: f64) -> Var<'t> {
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let n = &nodes[self.idx];
            (n.value.mapv(|x| scale * x + shift), n.requires_grad)
        };
        self.tape
            .push(value, Op::ScaleShift { p: self.idx, scale }, rg)
    }

    /// Sum of all elements, as a 0-D scalar.
    pub fn sum(&self) -> Var<'t> {
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let n = &nodes[self.idx];
            (
                ArrayD::from_elem(ndarray::IxDyn(&[]), n.value.sum()),
                n.requires_grad,
            )
        };
        self.tape.push(value, Op::Sum(self.idx), rg)
    }

    /// Mean of all elements, as a 0-D scalar.
    pub fn mean(&self) -> Var<'t> {
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let n = &nodes[self.idx];
            let len = n.value.len() as f64;
            (
                ArrayD::from_elem(ndarray::IxDyn(&[]), n.value.sum() / len),
                n.requires_grad,
            )
        };
        self.tape.push(value, Op::Mean(self.idx), rg)
    }

    /// Contiguous column block `[:, start..end]` of a matrix.
    pub fn slice_cols(&self, start: usize, end: usize) -> Result<Var<'t>, AutodiffError> {
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let n = &nodes[self.idx];
            let shape = n.value.shape();
            if shape.len() != 2 {
                return Err(AutodiffError::NotAMatrix {
                    op: "slice_cols",
                    shape: shape.to_vec(),
                });
            }
            if start >= end || end > shape[1] {
                return Err(AutodiffError::BadColumnRange {
                    start,
                    end,
                    cols: shape[1],
                });
            }
            let value = n
                .value
                .slice_axis(Axis(1), Slice::from(start..end))
                .to_owned();
            (value, n.requires_grad)
        };
        Ok(self.tape.push(
            value,
            Op::SliceCols {
                p: self.idx,
                start,
                end,
            },
            rg,
        ))
    }

    /// Horizontal concatenation `[self | rhs]` of matrices with equal row
    /// counts.
    pub fn concat_cols(&self, rhs: Var<'t>) -> Result<Var<'t>, AutodiffError> {
        self.same_tape(rhs)?;
        let (value, rg) = {
            let nodes = self.tape.nodes.borrow();
            let (a, b) = (&nodes[self.idx], &nodes[rhs.idx]);
            let (sa, sb) = (a.value.shape(), b.value.shape());
            if sa.len() != 2 {
                return Err(AutodiffError::NotAMatrix {
                    op: "concat_cols",
                    shape: sa.to_vec(),
                });
            }
            if sb.len() != 2 || sb[0] != sa[0] {
                return Err(AutodiffError::ShapeMismatch {
                    op: "concat_cols",
                    lhs: sa.to_vec(),
                    rhs: sb.to_vec(),
                });
            }
            let value = concatenate(Axis(1), &[a.value.view(), b.value.view()])
                .expect("shapes validated");
            (value, a.requires_grad || b.requires_grad)
        };
        Ok(self
            .tape
            .push(value, Op::ConcatCols(self.idx, rhs.idx), rg))
    }

    /// Runs the reverse sweep from this scalar, filling leaf gradients.
    ///
    /// May be called once per tape. The root must hold exactly one element
    /// and must depend on at least one gradient-requiring leaf.
    pub fn backward(&self) -> Result<(), AutodiffError> {
        if self.tape.is_spent() {
            return Err(AutodiffError::BackwardTwice);
        }
        let mut nodes = self.tape.nodes.borrow_mut();
        {
            let root = &nodes[self.idx];
            if root.value.len() != 1 {
                return Err(AutodiffError::NonScalarRoot {
                    len: root.value.len(),
                });
            }
            if !root.requires_grad {
                return Err(AutodiffError::DetachedGraph);
            }
        }
        self.tape.spent.set(true);

        let root_shape = nodes[self.idx].value.raw_dim();
        nodes[self.idx].grad = Some(ArrayD::ones(root_shape));

        for i in (0..=self.idx).rev() {
            let op = nodes[i].op;
            if matches!(op, Op::Leaf) || !nodes[i].requires_grad {
                continue;
            }
            // Interior gradients are final once we reach them (all consumers
            // have larger indices), so take the buffer and release it after
            // propagation.
            let Some(g) = nodes[i].grad.take() else {
                continue;
            };
            match op {
                Op::Leaf => unreachable!("leaves are skipped above"),
                Op::MatMul(a, b) => {
                    let ga = nodes[a]
                        .requires_grad
                        .then(|| mm_nt(&g, &nodes[b].value));
                    let gb = nodes[b]
                        .requires_grad
                        .then(|| mm_tn(&nodes[a].value, &g));
                    if let Some(ga) = ga {
                        accumulate(&mut nodes[a], ga);
                    }
                    if let Some(gb) = gb {
                        accumulate(&mut nodes[b], gb);
                    }
                }
                Op::MatMulNt(a, b) => {
                    let ga = nodes[a].requires_grad.then(|| mm(&g, &nodes[b].value));
                    let gb = nodes[b]
                        .requires_grad
                        .then(|| mm_tn(&g, &nodes[a].value));
                    if let Some(ga) = ga {
                        accumulate(&mut nodes[a], ga);
                    }
                    if let Some(gb) = gb {
                        accumulate(&mut nodes[b], gb);
                    }
                }
                Op::Add(a, b) => {
                    if nodes[a].requires_grad {
                        accumulate(&mut nodes[a], g.clone());
                    }
                    accumulate(&mut nodes[b], g);
                }
                Op::Sub(a, b) => {
                    let gb = nodes[b].requires_grad.then(|| -&g);
                    accumulate(&mut nodes[a], g);
                    if let Some(gb) = gb {
                        accumulate(&mut nodes[b], gb);
                    }
                }
                Op::Mul(a, b) => {
                    let ga = nodes[a].requires_grad.then(|| &g * &nodes[b].value);
                    let gb = nodes[b].requires_grad.then(|| &g * &nodes[a].value);
                    if let Some(ga) = ga {
                        accumulate(&mut nodes[a], ga);
                    }
                    if let Some(gb) = gb {
                        accumulate(&mut nodes[b], gb);
                    }
                }
                Op::AddRow(a, r) => {
                    let gr = nodes[r]
                        .requires_grad
                        .then(|| g.sum_axis(Axis(0)).insert_axis(Axis(0)));
                    if nodes[a].requires_grad {
                        accumulate(&mut nodes[a], g);
                    }
                    if let Some(gr) = gr {
                        accumulate(&mut nodes[r], gr);
                    }
                }
                Op::Sigmoid(a) => {
                    let ga = Zip::from(&nodes[i].value)
                        .and(&g)
                        .map_collect(|&y, &gi| gi * y * (1.0 - y));
                    accumulate(&mut nodes[a], ga);
                }
                Op::Tanh(a) => {
                    let ga = Zip::from(&nodes[i].value)
                        .and(&g)
                        .map_collect(|&y, &gi| gi * (1.0 - y * y));
                    accumulate(&mut nodes[a], ga);
                }
                Op::Relu(a) => {
                    let ga = Zip::from(&nodes[a].value)
                        .and(&g)
                        .map_collect(|&x, &gi| if x > 0.0 { gi } else { 0.0 });
                    accumulate(&mut nodes[a], ga);
                }
                Op::Abs(a) => {
                    let ga = Zip::from(&nodes[a].value).and(&g).map_collect(|&x, &gi| {
                        if x > 0.0 {
                            gi
                        } else if x < 0.0 {
                            -gi
                        } else {
                            0.0
                        }
                    });
                    accumulate(&mut nodes[a], ga);
                }
                Op::Square(a) => {
                    let ga = Zip::from(&nodes[a].value)
                        .and(&g)
                        .map_collect(|&x, &gi| gi * 2.0 * x);
                    accumulate(&mut nodes[a], ga);
                }
                Op::Sum(a) => {
                    let gv = *g.iter().next().expect("scalar");
                    let shape = nodes[a].value.raw_dim();
                    accumulate(&mut nodes[a], ArrayD::from_elem(shape, gv));
                }
                Op::Mean(a) => {
                    let gv = *g.iter().next().expect("scalar");
                    let shape = nodes[a].value.raw_dim();
                    let len = nodes[a].value.len() as f64;
                    accumulate(&mut nodes[a], ArrayD::from_elem(shape, gv / len));
                }
                Op::ScaleShift { p, scale } => {
                    accumulate(&mut nodes[p], g.mapv(|v| v * scale));
                }
                Op::SliceCols { p, start, end } => {
                    if nodes[p].requires_grad {
                        let slot = grad_slot(&mut nodes[p]);
                        let mut view =
                            slot.slice_axis_mut(Axis(1), Slice::from(start..end));
                        view += &g;
                    }
                }
                Op::ConcatCols(a, b) => {
                    let na = nodes[a].value.shape()[1];
                    let ga = nodes[a].requires_grad.then(|| {
                        g.slice_axis(Axis(1), Slice::from(..na)).to_owned()
                    });
                    let gb = nodes[b].requires_grad.then(|| {
                        g.slice_axis(Axis(1), Slice::from(na..)).to_owned()
                    });
                    if let Some(ga) = ga {
                        accumulate(&mut nodes[a], ga);
                    }
                    if let Some(gb) = gb {
                        accumulate(&mut nodes[b], gb);
                    }
                }
            }
        }
        Ok(())
    }
}

//! Scalar reverse-mode differentiation.
//!
//! A [`Tape`] records every arithmetic step applied to tracked [`Var`]s as
//! a node with at most two parents and the local partial derivatives.
//! [`Tape::gradient`] sweeps the nodes once in reverse creation order, so a
//! gradient costs a small constant multiple of the forward pass.
//!
//! Values with no dependence on any tracked input are carried as plain
//! constants and never touch the tape. In particular a constant zero is
//! the semiring zero, so sparse matrix code that skips zeros skips only
//! structural zeros and never an input that happens to equal zero.

use std::cell::RefCell;
use std::fmt;

use crate::semiring::{Ring, Semiring};

#[derive(Debug, Clone, Copy)]
struct Node {
    parents: [(u32, f64); 2],
    arity: u8,
}

#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tape({} nodes)", self.len())
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn push(&self, parents: [(u32, f64); 2], arity: u8) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let id = u32::try_from(nodes.len()).expect("tape exceeds u32 nodes");
        nodes.push(Node { parents, arity });
        id
    }

    /// A new tracked input.
    pub fn var(&self, value: f64) -> Var<'_> {
        Var {
            value,
            node: Some((self, self.push([(0, 0.0); 2], 0))),
        }
    }

    /// Adjoints of `output` with respect to every node, indexed by creation
    /// order; inputs created first occupy the leading entries.
    pub fn gradient(&self, output: &Var<'_>) -> Vec<f64> {
        let nodes = self.nodes.borrow();
        let mut adj = vec![0.0; nodes.len()];
        let Some((tape, id)) = output.node else {
            return adj;
        };
        assert!(std::ptr::eq(tape, self), "variable belongs to a different tape");
        adj[id as usize] = 1.0;
        for i in (0..=id as usize).rev() {
            let a = adj[i];
            if a == 0.0 {
                continue;
            }
            let n = nodes[i];
            for &(p, d) in &n.parents[..n.arity as usize] {
                adj[p as usize] += a * d;
            }
        }
        adj
    }
}

/// A real number, optionally tracked on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    value: f64,
    node: Option<(&'t Tape, u32)>,
}

impl fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some((_, id)) => write!(f, "Var({} @{id})", self.value),
            None => write!(f, "Var({})", self.value),
        }
    }
}

/// Compares values only.
impl PartialEq for Var<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<'t> Var<'t> {
    pub fn constant(value: f64) -> Self {
        Var { value, node: None }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_tracked(&self) -> bool {
        self.node.is_some()
    }

    /// Index of the node on its tape.
    pub fn index(&self) -> Option<usize> {
        self.node.map(|(_, id)| id as usize)
    }

    fn unary(&self, value: f64, d: f64) -> Self {
        match self.node {
            None => Var::constant(value),
            Some((tape, id)) => Var {
                value,
                node: Some((tape, tape.push([(id, d), (0, 0.0)], 1))),
            },
        }
    }

    fn binary(&self, rhs: &Self, value: f64, dl: f64, dr: f64) -> Self {
        match (self.node, rhs.node) {
            (None, None) => Var::constant(value),
            (Some(_), None) => self.unary(value, dl),
            (None, Some(_)) => rhs.unary(value, dr),
            (Some((tape, l)), Some((other, r))) => {
                assert!(std::ptr::eq(tape, other), "variables from different tapes");
                Var {
                    value,
                    node: Some((tape, tape.push([(l, dl), (r, dr)], 2))),
                }
            }
        }
    }

    pub fn ln(&self) -> Self {
        self.unary(self.value.ln(), 1.0 / self.value)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let q = self.value / rhs.value;
        self.binary(rhs, q, 1.0 / rhs.value, -q / rhs.value)
    }

    pub fn scale(&self, k: f64) -> Self {
        self.unary(self.value * k, k)
    }
}

impl Semiring for Var<'_> {
    fn zero() -> Self {
        Var::constant(0.0)
    }

    fn one() -> Self {
        Var::constant(1.0)
    }

    fn plus(&self, rhs: &Self) -> Self {
        if rhs.is_zero() {
            return *self;
        }
        if self.is_zero() {
            return *rhs;
        }
        self.binary(rhs, self.value + rhs.value, 1.0, 1.0)
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Var::zero();
        }
        self.binary(rhs, self.value * rhs.value, rhs.value, self.value)
    }

    /// Only untracked zeros are zero; a tracked input at value 0 still
    /// carries a derivative.
    fn is_zero(&self) -> bool {
        self.node.is_none() && self.value == 0.0
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self.value.approx_eq(&other.value)
    }

    fn distance(&self, other: &Self) -> f64 {
        self.value.distance(&other.value)
    }
}

impl Ring for Var<'_> {
    fn neg(&self) -> Self {
        self.unary(-self.value, -1.0)
    }
}

/// Real scalars the training objective is written over: plain `f64` for
/// evaluation and [`Var`] for differentiation.
pub trait Real: Ring + Copy {
    fn constant(x: f64) -> Self;
    fn value(&self) -> f64;
    fn ln(&self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn scale(&self, k: f64) -> Self;
}

impl Real for f64 {
    fn constant(x: f64) -> Self {
        x
    }
    fn value(&self) -> f64 {
        *self
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn scale(&self, k: f64) -> Self {
        self * k
    }
}

impl Real for Var<'_> {
    fn constant(x: f64) -> Self {
        Var::constant(x)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn ln(&self) -> Self {
        Var::ln(self)
    }
    fn div(&self, rhs: &Self) -> Self {
        Var::div(self, rhs)
    }
    fn scale(&self, k: f64) -> Self {
        Var::scale(self, k)
    }
}

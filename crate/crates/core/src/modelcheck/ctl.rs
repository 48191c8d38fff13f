//! Fixpoint evaluation of CTL-shaped formulas, used as an independent
//! reference for the automata-based checker.
//!
//! Every temporal operator must sit directly under a path quantifier.
//! The operands are Boolean combinations of state formulas and
//! constraints; they are evaluated on windows.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{constraint_depth, constraint_on_window, windows_of, Frame, WindowModel};
use crate::domain::ConcreteDomain;
use crate::error::{Error, Result};
use crate::formula::{PathFormula, StateFormula};
use crate::kripke::ConstraintKripke;

/// The nodes of `c` satisfying the CTL-shaped formula `f`.
pub fn check_ctl_oracle(c: &ConstraintKripke, f: &StateFormula, dom: &ConcreteDomain) -> Result<Vec<usize>> {
    c.check_domain(dom)?;
    let frame = Frame::from_model(c);
    let windows = windows_of(&frame.names, &frame.succ, constraint_depth(f))?;
    let o = Oracle {
        frame: &frame,
        dom,
        wm: &windows,
    };
    let sat = o.state(f)?;
    Ok((0..sat.len()).filter(|&i| sat[i]).collect())
}

struct Oracle<'a> {
    frame: &'a Frame,
    dom: &'a ConcreteDomain,
    wm: &'a WindowModel,
}

impl Oracle<'_> {
    fn state(&self, f: &StateFormula) -> Result<Vec<bool>> {
        let n = self.frame.node_count();
        Ok(match f {
            StateFormula::True => vec![true; n],
            StateFormula::False => vec![false; n],
            StateFormula::Prop(p) => (0..n)
                .map(|i| self.frame.prop(i, p).is_true())
                .collect(),
            StateFormula::Not(a) => self.state(a)?.into_iter().map(|b| !b).collect(),
            StateFormula::And(a, b) => zip(&self.state(a)?, &self.state(b)?, |x, y| x && y),
            StateFormula::Or(a, b) => zip(&self.state(a)?, &self.state(b)?, |x, y| x || y),
            StateFormula::Exists(p) => {
                let w = self.path(p, true)?;
                self.lift(&w, true)
            }
            StateFormula::All(p) => {
                let w = self.path(p, false)?;
                self.lift(&w, false)
            }
        })
    }

    fn lift(&self, w: &[bool], existential: bool) -> Vec<bool> {
        self.wm
            .starting_at
            .iter()
            .map(|ws| {
                if existential {
                    ws.iter().any(|&x| w[x])
                } else {
                    ws.iter().all(|&x| w[x])
                }
            })
            .collect()
    }

    /// Window-level satisfaction of a quantified path formula.
    fn path(&self, p: &PathFormula, existential: bool) -> Result<Vec<bool>> {
        match p {
            PathFormula::Next(a) => {
                let a = self.local(a)?;
                Ok(self.pre(&a, existential))
            }
            PathFormula::Until(a, b) => {
                let (a, b) = (self.local(a)?, self.local(b)?);
                // μZ. b ∨ (a ∧ pre(Z))
                let mut z = vec![false; a.len()];
                loop {
                    let pz = self.pre(&z, existential);
                    let next: Vec<bool> = (0..a.len()).map(|i| b[i] || (a[i] && pz[i])).collect();
                    if next == z {
                        return Ok(z);
                    }
                    z = next;
                }
            }
            PathFormula::Release(a, b) => {
                let (a, b) = (self.local(a)?, self.local(b)?);
                // νZ. b ∧ (a ∨ pre(Z))
                let mut z = vec![true; a.len()];
                loop {
                    let pz = self.pre(&z, existential);
                    let next: Vec<bool> = (0..a.len()).map(|i| b[i] && (a[i] || pz[i])).collect();
                    if next == z {
                        return Ok(z);
                    }
                    z = next;
                }
            }
            other => self.local(other),
        }
    }

    fn pre(&self, z: &[bool], existential: bool) -> Vec<bool> {
        self.wm
            .succ
            .iter()
            .map(|s| {
                if existential {
                    s.iter().any(|&x| z[x])
                } else {
                    s.iter().all(|&x| z[x])
                }
            })
            .collect()
    }

    /// Truth per window of a formula without temporal operators.
    fn local(&self, p: &PathFormula) -> Result<Vec<bool>> {
        Ok(match p {
            PathFormula::State(s) => {
                let s = self.state(s)?;
                self.wm.windows.iter().map(|w| s[w[0]]).collect()
            }
            PathFormula::Constraint(c) => {
                let mut out = Vec::with_capacity(self.wm.windows.len());
                for w in &self.wm.windows {
                    out.push(constraint_on_window(self.frame, self.dom, c, w)?.is_true());
                }
                out
            }
            PathFormula::Not(a) => self.local(a)?.into_iter().map(|b| !b).collect(),
            PathFormula::And(a, b) => zip(&self.local(a)?, &self.local(b)?, |x, y| x && y),
            PathFormula::Or(a, b) => zip(&self.local(a)?, &self.local(b)?, |x, y| x || y),
            temporal => {
                return Err(Error::NotCtl(format!(
                    "temporal operator not directly under a path quantifier: {temporal}"
                )))
            }
        })
    }
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

//! Terms over a signature and their evaluation in finite algebras.

use serde_json::Value;

use crate::algebra::{Element, FiniteAlgebra, Signature};
use crate::error::{Error, Result};

/// A term: a variable (by index) or an operation symbol (by its index in
/// the signature) applied to subterms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Op(usize, Vec<Term>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn op(symbol: usize, args: Vec<Term>) -> Term {
        Term::Op(symbol, args)
    }

    /// Largest variable index plus one (0 for ground terms).
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Op(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Op(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Op(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Replaces every variable `i` by `f(i)`.
    pub fn substitute(&self, f: &impl Fn(usize) -> Term) -> Term {
        match self {
            Term::Var(i) => f(*i),
            Term::Op(s, args) => Term::Op(*s, args.iter().map(|a| a.substitute(f)).collect()),
        }
    }

    /// Checks arities and symbol indices against a signature.
    pub fn check(&self, sig: &Signature, vars: usize) -> Result<()> {
        match self {
            Term::Var(i) if *i < vars => Ok(()),
            Term::Var(i) => Err(Error::UnboundVariable(*i)),
            Term::Op(s, args) => {
                if *s >= sig.len() {
                    return Err(Error::UnknownSymbol(format!("#{s}")));
                }
                if sig.arity(*s) != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: sig.name(*s).to_string(),
                        expected: sig.arity(*s),
                        got: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig, vars))
            }
        }
    }

    /// Human-readable rendering; binary symbols made of punctuation print
    /// infix.
    pub fn render(&self, sig: &Signature, vars: &[&str]) -> String {
        match self {
            Term::Var(i) => vars
                .get(*i)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("v{i}")),
            Term::Op(s, args) => {
                let name = sig.name(*s);
                if args.is_empty() {
                    name.to_string()
                } else if args.len() == 2 && !name.chars().any(char::is_alphanumeric) {
                    format!(
                        "({} {name} {})",
                        args[0].render(sig, vars),
                        args[1].render(sig, vars)
                    )
                } else {
                    let inner: Vec<String> = args.iter().map(|a| a.render(sig, vars)).collect();
                    format!("{name}({})", inner.join(", "))
                }
            }
        }
    }

    /// Nested prefix form: `["+", ["x"], ["y"]]`.
    pub fn to_json(&self, sig: &Signature, vars: &[&str]) -> Value {
        match self {
            Term::Var(i) => {
                let name = vars
                    .get(*i)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("v{i}"));
                Value::Array(vec![Value::String(name)])
            }
            Term::Op(s, args) => {
                let mut out = vec![Value::String(sig.name(*s).to_string())];
                out.extend(args.iter().map(|a| a.to_json(sig, vars)));
                Value::Array(out)
            }
        }
    }

    /// Parses the prefix form. A name in `vars` is a variable; anything
    /// else must be a symbol of `sig`.
    pub fn from_json(value: &Value, sig: &Signature, vars: &[&str]) -> Result<Term> {
        let items = value
            .as_array()
            .filter(|a| !a.is_empty())
            .ok_or_else(|| Error::Format(format!("term must be a non-empty array: {value}")))?;
        let head = items[0]
            .as_str()
            .ok_or_else(|| Error::Format(format!("term head must be a string: {value}")))?;
        if let Some(i) = vars.iter().position(|v| *v == head) {
            if items.len() != 1 {
                return Err(Error::Format(format!(
                    "variable `{head}` applied to arguments"
                )));
            }
            if sig.index_of(head).is_some() {
                return Err(Error::Format(format!(
                    "`{head}` is both a variable and a symbol"
                )));
            }
            return Ok(Term::Var(i));
        }
        let s = sig
            .index_of(head)
            .ok_or_else(|| Error::UnknownSymbol(head.to_string()))?;
        let args = items[1..]
            .iter()
            .map(|v| Term::from_json(v, sig, vars))
            .collect::<Result<Vec<_>>>()?;
        if args.len() != sig.arity(s) {
            return Err(Error::ArityMismatch {
                symbol: head.to_string(),
                expected: sig.arity(s),
                got: args.len(),
            });
        }
        Ok(Term::Op(s, args))
    }
}

/// Value of the term operation of `t` at `env`.
pub fn eval_term(alg: &FiniteAlgebra, t: &Term, env: &[Element]) -> Result<Element> {
    match t {
        Term::Var(i) => env.get(*i).copied().ok_or(Error::UnboundVariable(*i)),
        Term::Op(s, args) => {
            let sig = alg.signature();
            if *s >= sig.len() {
                return Err(Error::UnknownSymbol(format!("#{s}")));
            }
            if sig.arity(*s) != args.len() {
                return Err(Error::ArityMismatch {
                    symbol: sig.name(*s).to_string(),
                    expected: sig.arity(*s),
                    got: args.len(),
                });
            }
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(eval_term(alg, a, env)?);
            }
            Ok(alg.apply(*s, &vals))
        }
    }
}

/// Evaluation for terms already checked with [`Term::check`].
pub(crate) fn eval_unchecked(alg: &FiniteAlgebra, t: &Term, env: &[Element]) -> Element {
    match t {
        Term::Var(i) => env[*i],
        Term::Op(s, args) => {
            let mut vals = [0usize; crate::algebra::MAX_ARITY];
            for (slot, a) in vals.iter_mut().zip(args) {
                *slot = eval_unchecked(alg, a, env);
            }
            alg.apply(*s, &vals[..args.len()])
        }
    }
}

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use super::ExtensionError;
use crate::syntax::{Formula, Signature, Term};
use crate::valuation::{is_totally_denoting, AtomValuation};

/// A totally denoting valuation extended with the reserved constant
/// `undef`. Equalities are the smallest set containing the reflexive
/// equalities and the true base equalities, closed under function
/// congruence. Every other atom mentioning `undef` is false.
pub struct Lifted {
    base: Arc<dyn AtomValuation>,
    sig: Signature,
    memo: Mutex<HashMap<(Term, Term), bool>>,
}

impl fmt::Debug for Lifted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lifted").field("sig", &self.sig).finish()
    }
}

pub fn lift_undefined(v: Arc<dyn AtomValuation>) -> Result<Lifted, ExtensionError> {
    if !is_totally_denoting(v.as_ref()) {
        return Err(ExtensionError::NotTotallyDenoting);
    }
    let sig = v.signature().with_undef();
    Ok(Lifted { base: v, sig, memo: Mutex::new(HashMap::new()) })
}

impl Lifted {
    pub fn base(&self) -> &Arc<dyn AtomValuation> {
        &self.base
    }

    /// Membership of `r = s` in the equality closure.
    pub fn eq_up(&self, r: &Term, s: &Term) -> bool {
        if r == s {
            return true;
        }
        if !r.has_undef() && !s.has_undef() {
            return self.base.atom(&Formula::eq(r.clone(), s.clone()));
        }
        let key = (r.clone(), s.clone());
        if let Some(&b) = self.memo.lock().unwrap().get(&key) {
            return b;
        }
        let out = match (r, s) {
            (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| self.eq_up(x, y))
            }
            _ => false,
        };
        self.memo.lock().unwrap().insert(key, out);
        out
    }
}

impl AtomValuation for Lifted {
    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn domain(&self) -> &[String] {
        self.base.domain()
    }

    fn atom(&self, f: &Formula) -> bool {
        match f {
            Formula::Equal(l, r) => self.eq_up(l, r),
            Formula::Atom(_, args) if args.iter().any(Term::has_undef) => false,
            _ => self.base.atom(f),
        }
    }
}

//! A concrete model of the runtime operators that roles and procs are
//! interpreted against.
//!
//! Encryption is randomized: every encryption value carries a tag drawn
//! from a [`TagSource`], and structural equality includes the tag, so
//! encrypting the same plaintext twice under the same key yields unequal
//! values. Hashing, pairing, and quotation are deterministic. Plaintexts
//! are stored in the clear — this is a semantic model, not cryptography.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::terms::Sort;

/// A runtime value.
///
/// `Priv(n)` and `Pub(n)` with equal index are the unique runtime key
/// pair for that index. Atoms never carry the `Akey`/`Ikey` sorts; keys
/// have their own constructors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RtVal {
    Atom(Sort, u64),
    Priv(u64),
    Pub(u64),
    Pair(Box<RtVal>, Box<RtVal>),
    Hash(Box<RtVal>),
    Quote(String),
    Enc {
        plain: Box<RtVal>,
        key: Box<RtVal>,
        tag: u64,
    },
}

impl RtVal {
    pub fn atom(sort: Sort, id: u64) -> RtVal {
        debug_assert!(sort.is_base() && sort != Sort::Akey && sort != Sort::Ikey);
        RtVal::Atom(sort, id)
    }

    pub fn pair(a: RtVal, b: RtVal) -> RtVal {
        RtVal::Pair(Box::new(a), Box::new(b))
    }

    pub fn hash(inner: RtVal) -> RtVal {
        RtVal::Hash(Box::new(inner))
    }

    pub fn enc(plain: RtVal, key: RtVal, tag: u64) -> RtVal {
        RtVal::Enc {
            plain: Box::new(plain),
            key: Box::new(key),
            tag,
        }
    }
}

/// Supplies the tags that make encryption randomized. `Counter` never
/// repeats a tag; `Seeded` draws from a 64-bit space so repeated runs
/// are reproducible per seed.
#[derive(Debug, Clone)]
pub enum TagSource {
    Counter(u64),
    Seeded(Box<ChaCha8Rng>),
}

impl TagSource {
    pub fn counter() -> TagSource {
        TagSource::Counter(0)
    }

    pub fn counter_from(start: u64) -> TagSource {
        TagSource::Counter(start)
    }

    pub fn seeded(seed: u64) -> TagSource {
        TagSource::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn next_tag(&mut self) -> u64 {
        match self {
            TagSource::Counter(next) => {
                let tag = *next;
                *next += 1;
                tag
            }
            TagSource::Seeded(rng) => rng.gen(),
        }
    }
}

pub fn rt_pair(a: &RtVal, b: &RtVal) -> RtVal {
    RtVal::pair(a.clone(), b.clone())
}

/// First projection; defined exactly on pairs.
pub fn rt_frst(r: &RtVal) -> Option<RtVal> {
    match r {
        RtVal::Pair(a, _) => Some((**a).clone()),
        _ => None,
    }
}

/// Second projection; defined exactly on pairs.
pub fn rt_scnd(r: &RtVal) -> Option<RtVal> {
    match r {
        RtVal::Pair(_, b) => Some((**b).clone()),
        _ => None,
    }
}

/// Encrypt `plain` under `key` with a fresh tag. Any value may serve as
/// a key.
pub fn rt_encrypt(plain: &RtVal, key: &RtVal, tags: &mut TagSource) -> RtVal {
    RtVal::enc(plain.clone(), key.clone(), tags.next_tag())
}

/// The relational view of encryption: does `e` record an encryption of
/// `plain` under `key`?
pub fn rt_encr_check(plain: &RtVal, key: &RtVal, e: &RtVal) -> bool {
    match e {
        RtVal::Enc {
            plain: p, key: k, ..
        } => **p == *plain && **k == *key,
        _ => false,
    }
}

/// Decrypt `e` with `kd`; succeeds exactly when `kd` is the runtime
/// inverse of the key `e` was encrypted under.
pub fn rt_decr(e: &RtVal, kd: &RtVal) -> Option<RtVal> {
    match e {
        RtVal::Enc { plain, key, .. } if rt_inv_check(key, kd) => Some((**plain).clone()),
        _ => None,
    }
}

/// Hashing is deterministic and injective; there is no way to invert it.
pub fn rt_hash(r: &RtVal) -> RtVal {
    RtVal::hash(r.clone())
}

pub fn rt_quote(s: &str) -> RtVal {
    RtVal::Quote(s.to_string())
}

/// The public partner of a private key; undefined off sort `Ikey`. The
/// reverse direction is never computed.
pub fn rt_pubof(r: &RtVal) -> Option<RtVal> {
    match r {
        RtVal::Priv(n) => Some(RtVal::Pub(*n)),
        _ => None,
    }
}

/// `(a, b)` make a runtime key pair when `b` is the public partner of `a`.
pub fn rt_kypr(a: &RtVal, b: &RtVal) -> bool {
    rt_pubof(a).as_ref() == Some(b)
}

/// The runtime inverse relation: key pairs in either order, identity on
/// values outside the asymmetric-key sorts.
pub fn rt_inv_check(a: &RtVal, b: &RtVal) -> bool {
    if rt_kypr(a, b) || rt_kypr(b, a) {
        return true;
    }
    a == b && rt_sort(a) != Sort::Akey && rt_sort(a) != Sort::Ikey
}

/// Generate the `n`th fresh value of a base sort; rejects `Mesg`.
/// Deterministic in `(n, sort)` within a session.
pub fn rt_gen(n: u32, sort: Sort) -> Option<RtVal> {
    match sort {
        Sort::Mesg => None,
        Sort::Ikey => Some(RtVal::Priv(n as u64)),
        Sort::Akey => Some(RtVal::Pub(n as u64)),
        other => Some(RtVal::Atom(other, n as u64)),
    }
}

pub fn rt_sort(r: &RtVal) -> Sort {
    match r {
        RtVal::Atom(sort, _) => *sort,
        RtVal::Priv(_) => Sort::Ikey,
        RtVal::Pub(_) => Sort::Akey,
        RtVal::Pair(..) | RtVal::Hash(_) | RtVal::Quote(_) | RtVal::Enc { .. } => Sort::Mesg,
    }
}

//! Finite fields, their extensions, and polynomials over them.

mod field;
mod poly;

use std::collections::HashMap;
use std::sync::Mutex;

use std::sync::LazyLock;
use thiserror::Error;

pub use field::{prime_power, FqElem, FqField, MAX_FIELD_SIZE};
pub use poly::{monic_irreducibles, monic_polys, Factorization, FqPoly, MAX_FACTOR_DEGREE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field of order {p}^{n} exceeds the supported size")]
    TooLarge { p: u32, n: u32 },
    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,
    #[error("degree {0} exceeds the factorization bound")]
    DegreeTooLarge(usize),
    #[error("fields have different characteristic or incompatible degrees")]
    Incompatible,
}

/// A field embedding `F_q -> F_{q^m}`, stored as the image of the base
/// generator (the least root of the base modulus in the target).
#[derive(Clone, Debug)]
pub struct Embedding {
    source: FqField,
    target: FqField,
    image: Vec<FqElem>,
    preimage: HashMap<FqElem, FqElem>,
}

// Embeddings are canonical, so the endpoints determine them.
impl PartialEq for Embedding {
    fn eq(&self, o: &Self) -> bool {
        self.source == o.source && self.target == o.target
    }
}

impl Eq for Embedding {}

static EMBEDDINGS: LazyLock<Mutex<HashMap<(u64, u64), Embedding>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

impl Embedding {
    /// The canonical embedding of `source` into `target`.
    pub fn new(source: &FqField, target: &FqField) -> Result<Embedding, FieldError> {
        if source.characteristic() != target.characteristic()
            || !target.degree().is_multiple_of(source.degree())
        {
            return Err(FieldError::Incompatible);
        }
        let key = (source.size() as u64, target.size() as u64);
        if let Some(e) = EMBEDDINGS.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let gen_image = if source.degree() == 1 {
            target.one()
        } else {
            let modulus: Vec<FqElem> = source
                .modulus()
                .iter()
                .map(|&c| target.from_prime(c))
                .collect();
            let roots = FqPoly::new(target, modulus).roots();
            *roots.first().ok_or(FieldError::Incompatible)?
        };
        let n = source.degree() as usize;
        let powers: Vec<FqElem> = (0..n).map(|j| target.pow(gen_image, j as u64)).collect();
        let image: Vec<FqElem> = source
            .elements()
            .map(|x| {
                source
                    .coords(x)
                    .iter()
                    .zip(&powers)
                    .fold(target.zero(), |acc, (&c, &g)| {
                        target.add(acc, target.mul(target.from_prime(c), g))
                    })
            })
            .collect();
        let preimage = source.elements().map(|x| (image[x.0 as usize], x)).collect();
        let e = Embedding {
            source: source.clone(),
            target: target.clone(),
            image,
            preimage,
        };
        EMBEDDINGS.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    pub fn source(&self) -> &FqField {
        &self.source
    }

    pub fn target(&self) -> &FqField {
        &self.target
    }

    /// Image of the base field's generator.
    pub fn generator_image(&self) -> FqElem {
        self.apply(self.source.generator())
    }

    pub fn apply(&self, x: FqElem) -> FqElem {
        self.image[x.0 as usize]
    }

    /// Inverse on the image; `None` outside the embedded subfield.
    pub fn preimage(&self, y: FqElem) -> Option<FqElem> {
        self.preimage.get(&y).copied()
    }

    pub fn apply_poly(&self, f: &FqPoly) -> FqPoly {
        f.map_coeffs(&self.target, |c| self.apply(c))
    }
}

/// An extension field together with its embedding of the base.
#[derive(Clone, Debug)]
pub struct FieldExtension {
    pub field: FqField,
    pub embedding: Embedding,
}

/// The degree-`m` extension of `base`, with the canonical embedding.
pub fn build_extension(base: &FqField, m: u32) -> Result<FieldExtension, FieldError> {
    if m == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let field = FqField::new(base.characteristic(), base.degree() * m)?;
    let embedding = Embedding::new(base, &field)?;
    Ok(FieldExtension { field, embedding })
}

use std::cmp::Ordering;

/// `u^component` differentiated `order` times in x.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct JetVar {
    pub component: u16,
    pub order: u16,
}

impl JetVar {
    pub fn new(component: usize, order: usize) -> Self {
        JetVar {
            component: component as u16,
            order: order as u16,
        }
    }

    pub fn next(self) -> Self {
        JetVar {
            component: self.component,
            order: self.order + 1,
        }
    }
}

/// Power product `x^a t^b prod u_J^e` with jet factors kept sorted and
/// zero exponents removed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    x: u32,
    t: u32,
    jets: Vec<(JetVar, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn x_pow(n: u32) -> Self {
        Monomial {
            x: n,
            ..Self::default()
        }
    }

    pub fn t_pow(n: u32) -> Self {
        Monomial {
            t: n,
            ..Self::default()
        }
    }

    pub fn jet(v: JetVar, e: u32) -> Self {
        Self::one().with_jet_exp(v, e)
    }

    pub fn x_exp(&self) -> u32 {
        self.x
    }

    pub fn t_exp(&self) -> u32 {
        self.t
    }

    pub fn jets(&self) -> &[(JetVar, u32)] {
        &self.jets
    }

    pub fn is_one(&self) -> bool {
        self.x == 0 && self.t == 0 && self.jets.is_empty()
    }

    pub fn is_u_free(&self) -> bool {
        self.jets.is_empty()
    }

    pub fn exponent(&self, v: JetVar) -> u32 {
        match self.jets.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.jets[i].1,
            Err(_) => 0,
        }
    }

    /// Total degree in the jet variables (x and t excluded).
    pub fn degree(&self) -> u32 {
        self.jets.iter().map(|&(_, e)| e).sum()
    }

    pub fn max_order(&self) -> Option<u16> {
        self.jets.iter().map(|&(v, _)| v.order).max()
    }

    pub fn with_x(&self, x: u32) -> Self {
        Monomial { x, ..self.clone() }
    }

    pub fn with_t(&self, t: u32) -> Self {
        Monomial { t, ..self.clone() }
    }

    /// The jet-only part of the monomial.
    pub fn u_part(&self) -> Self {
        Monomial {
            x: 0,
            t: 0,
            jets: self.jets.clone(),
        }
    }

    pub fn with_jet_exp(&self, v: JetVar, e: u32) -> Self {
        let mut jets = self.jets.clone();
        match jets.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) if e == 0 => {
                jets.remove(i);
            }
            Ok(i) => jets[i].1 = e,
            Err(_) if e == 0 => {}
            Err(i) => jets.insert(i, (v, e)),
        }
        Monomial {
            x: self.x,
            t: self.t,
            jets,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut jets = Vec::with_capacity(self.jets.len() + other.jets.len());
        let (mut i, mut j) = (0, 0);
        while i < self.jets.len() && j < other.jets.len() {
            let (a, ea) = self.jets[i];
            let (b, eb) = other.jets[j];
            match a.cmp(&b) {
                Ordering::Less => {
                    jets.push((a, ea));
                    i += 1;
                }
                Ordering::Greater => {
                    jets.push((b, eb));
                    j += 1;
                }
                Ordering::Equal => {
                    jets.push((a, ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        jets.extend_from_slice(&self.jets[i..]);
        jets.extend_from_slice(&other.jets[j..]);
        Monomial {
            x: self.x + other.x,
            t: self.t + other.t,
            jets,
        }
    }
}

/// Higher jet degree first, then jets, then powers of x and t. Any total
/// order works for canonical storage; this one reads naturally when printed.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.jets.cmp(&other.jets))
            .then_with(|| other.x.cmp(&self.x))
            .then_with(|| other.t.cmp(&self.t))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

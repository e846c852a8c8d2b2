//! Named state families and the textual state-spec grammar.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! spec   := term ( '*' term )*
//! term   := 'ghz(' N ')' | 'w(' N ')' | 'zero(' N ')' | 'bell'
//!         | 'mix(' weight ':' spec ( ',' weight ':' spec )* ')'
//! ```
//!
//! Example: `w(3)*ghz(3)*zero(2)`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{argument, EntError, Result};
use crate::qcore::{kron, kron_vec, ComplexMatrix, RegisterLayout, StateObject, ONE, ZERO};

/// Largest register built as an amplitude vector.
pub const MAX_PURE_QUBITS: usize = 20;
/// Largest register built as a density matrix.
pub const MAX_MIXED_QUBITS: usize = 10;

fn check_pure_size(n: usize) -> Result<()> {
    if n > MAX_PURE_QUBITS {
        return Err(EntError::Size(format!("{n} qubits exceed the pure-state cap of {MAX_PURE_QUBITS}")));
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(|0...0> + |1...1>)/sqrt(2)` on `n` qubits.
pub fn ghz(n: usize) -> Result<StateObject> {
    if n == 0 {
        return argument("ghz needs n >= 1");
    }
    check_pure_size(n)?;
    let dim = RegisterLayout::qubits(n)?.total_dim();
    let mut amps = vec![ZERO; dim];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = real(s);
    amps[dim - 1] = real(s);
    StateObject::pure(amps)
}

/// Uniform superposition of the `n` single-excitation basis states.
pub fn w(n: usize) -> Result<StateObject> {
    if n == 0 {
        return argument("w needs n >= 1");
    }
    check_pure_size(n)?;
    let dim = RegisterLayout::qubits(n)?.total_dim();
    let mut amps = vec![ZERO; dim];
    let s = 1.0 / (n as f64).sqrt();
    for q in 0..n {
        amps[1 << q] = real(s);
    }
    StateObject::pure(amps)
}

/// `|0...0>` on `n` qubits.
pub fn zero(n: usize) -> Result<StateObject> {
    if n == 0 {
        return argument("zero needs n >= 1");
    }
    check_pure_size(n)?;
    let dim = RegisterLayout::qubits(n)?.total_dim();
    let mut amps = vec![ZERO; dim];
    amps[0] = ONE;
    StateObject::pure(amps)
}

/// `(|00> + |11>)/sqrt(2)`.
pub fn bell() -> StateObject {
    ghz(2).expect("two-qubit GHZ is always valid")
}

/// The `k`-qubit marginal of `|W_n>`: `(k/n)|W_k><W_k| + (1 - k/n)|0^k><0^k|`,
/// assembled directly from the closed form.
pub fn w_reduced(k: usize, n: usize) -> Result<StateObject> {
    if k == 0 || k > n {
        return argument(format!("w_reduced needs 1 <= k <= n, got k={k}, n={n}"));
    }
    if k > MAX_MIXED_QUBITS {
        return Err(EntError::Size(format!("{k} qubits exceed the mixed-state cap")));
    }
    let wk = w(k)?;
    let frac = k as f64 / n as f64;
    let mut rho = ComplexMatrix::projector(wk.amplitudes().expect("w is pure")).scale_real(frac);
    rho[(0, 0)] += real(1.0 - frac);
    StateObject::mixed(rho)
}

/// `sqrt(m/k)|10> + sqrt((k-m)/k)|01>`.
pub fn psi_mk(m: usize, k: usize) -> Result<StateObject> {
    if m == 0 || m >= k {
        return argument(format!("psi_mk needs 1 <= m < k, got m={m}, k={k}"));
    }
    let a = (m as f64 / k as f64).sqrt();
    let b = ((k - m) as f64 / k as f64).sqrt();
    StateObject::pure(vec![ZERO, real(b), real(a), ZERO])
}

/// Abstract syntax of a state family expression.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Ghz(usize),
    W(usize),
    Bell,
    Zero(usize),
    Product(Vec<StateSpec>),
    Mix(Vec<(f64, StateSpec)>),
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(spec)
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            StateSpec::Ghz(n) | StateSpec::W(n) | StateSpec::Zero(n) => *n,
            StateSpec::Bell => 2,
            StateSpec::Product(parts) => parts.iter().map(StateSpec::n_qubits).sum(),
            StateSpec::Mix(branches) => branches.first().map_or(0, |(_, s)| s.n_qubits()),
        }
    }

    fn contains_mix(&self) -> bool {
        match self {
            StateSpec::Mix(_) => true,
            StateSpec::Product(parts) => parts.iter().any(StateSpec::contains_mix),
            _ => false,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            StateSpec::Ghz(n) | StateSpec::W(n) | StateSpec::Zero(n) if *n == 0 => {
                argument("state families need n >= 1")
            }
            StateSpec::Product(parts) => {
                if parts.is_empty() {
                    return argument("empty product");
                }
                parts.iter().try_for_each(StateSpec::validate)
            }
            StateSpec::Mix(branches) => {
                if branches.is_empty() {
                    return argument("empty mixture");
                }
                let n = branches[0].1.n_qubits();
                let mut total = 0.0;
                for (p, s) in branches {
                    if *p <= 0.0 || !p.is_finite() {
                        return argument(format!("mixture weight {p} must be positive"));
                    }
                    if s.n_qubits() != n {
                        return argument("mixture branches act on different qubit counts");
                    }
                    s.validate()?;
                    total += p;
                }
                if (total - 1.0).abs() > 1e-10 {
                    return argument(format!("mixture weights sum to {total}, not 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Ghz(n) => write!(f, "ghz({n})"),
            StateSpec::W(n) => write!(f, "w({n})"),
            StateSpec::Bell => write!(f, "bell"),
            StateSpec::Zero(n) => write!(f, "zero({n})"),
            StateSpec::Product(parts) => {
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{part}")?;
                }
                Ok(())
            }
            StateSpec::Mix(branches) => {
                write!(f, "mix(")?;
                for (i, (p, s)) in branches.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}:{s}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> EntError {
        EntError::Parse { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a state name"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn count(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        digits.parse().map_err(|_| EntError::Parse { offset: start, message: "expected an integer".into() })
    }

    fn weight(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || matches!(self.src[self.pos], b'.' | b'e' | b'E' | b'-' | b'+'))
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| EntError::Parse { offset: start, message: "expected a weight".into() })
    }

    fn paren_count(&mut self) -> Result<usize> {
        self.expect(b'(')?;
        let n = self.count()?;
        self.expect(b')')?;
        Ok(n)
    }

    fn term(&mut self) -> Result<StateSpec> {
        let start = self.pos;
        let name = self.ident()?.to_ascii_lowercase();
        match name.as_str() {
            "ghz" => Ok(StateSpec::Ghz(self.paren_count()?)),
            "w" => Ok(StateSpec::W(self.paren_count()?)),
            "zero" => Ok(StateSpec::Zero(self.paren_count()?)),
            "bell" => Ok(StateSpec::Bell),
            "mix" => {
                self.expect(b'(')?;
                let mut branches = Vec::new();
                loop {
                    let p = self.weight()?;
                    self.expect(b':')?;
                    let s = self.spec()?;
                    branches.push((p, s));
                    if !self.eat(b',') {
                        break;
                    }
                }
                self.expect(b')')?;
                Ok(StateSpec::Mix(branches))
            }
            other => Err(EntError::Parse { offset: start, message: format!("unknown state '{other}'") }),
        }
    }

    fn spec(&mut self) -> Result<StateSpec> {
        let mut parts = vec![self.term()?];
        while self.eat(b'*') {
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { StateSpec::Product(parts) })
    }
}

/// Materializes a spec. Products keep a pure representation when every factor
/// is pure; any mixture yields a density matrix.
pub fn build(spec: &StateSpec) -> Result<StateObject> {
    spec.validate()?;
    let n = spec.n_qubits();
    if spec.contains_mix() {
        if n > MAX_MIXED_QUBITS {
            return Err(EntError::Size(format!("{n} qubits exceed the mixed-state cap of {MAX_MIXED_QUBITS}")));
        }
    } else {
        check_pure_size(n)?;
    }
    build_inner(spec)
}

fn build_inner(spec: &StateSpec) -> Result<StateObject> {
    match spec {
        StateSpec::Ghz(n) => ghz(*n),
        StateSpec::W(n) => w(*n),
        StateSpec::Zero(n) => zero(*n),
        StateSpec::Bell => Ok(bell()),
        StateSpec::Product(parts) => {
            let built = parts.iter().map(build_inner).collect::<Result<Vec<_>>>()?;
            if built.iter().all(StateObject::is_pure_vector) {
                let mut amps = vec![ONE];
                for s in &built {
                    amps = kron_vec(&amps, s.amplitudes().expect("pure"))?;
                }
                Ok(StateObject::from_pure_unchecked(amps))
            } else {
                let mut rho = ComplexMatrix::identity(1);
                for s in &built {
                    rho = kron(&rho, &s.density_matrix())?;
                }
                Ok(StateObject::from_density_unchecked(rho))
            }
        }
        StateSpec::Mix(branches) => {
            let dim = 1usize << spec.n_qubits();
            let mut rho = ComplexMatrix::zeros(dim, dim);
            for (p, s) in branches {
                rho = rho.add(&build_inner(s)?.density_matrix().scale_real(*p));
            }
            StateObject::mixed(rho)
        }
    }
}

//! Named small groups: every group of order at most 16, plus S4.

use crate::group::FiniteGroup;

pub fn cyclic(n: usize) -> FiniteGroup {
    FiniteGroup::from_fn(n, |a, b| (a + b) % n).with_name(&format!("C{n}"))
}

/// Abelian group `⊕ Z/moduli[i]`, elements in mixed radix with the first modulus most significant.
fn abelian(moduli: &[usize]) -> FiniteGroup {
    let n: usize = moduli.iter().product();
    let decode = |x: usize| -> Vec<usize> {
        let mut v = vec![0; moduli.len()];
        let mut x = x;
        for i in (0..moduli.len()).rev() {
            v[i] = x % moduli[i];
            x /= moduli[i];
        }
        v
    };
    FiniteGroup::from_fn(n, |a, b| {
        let (u, v) = (decode(a), decode(b));
        moduli.iter().enumerate().fold(0, |acc, (i, &m)| acc * m + (u[i] + v[i]) % m)
    })
}

/// `(⊕ Z/moduli) ⋊ C_k`, the generator of `C_k` acting by `action` (column `j` is the image of `e_j`).
fn semidirect(moduli: &[usize], action: &[Vec<usize>], k: usize) -> FiniteGroup {
    let d = moduli.len();
    let n: usize = moduli.iter().product();
    let decode = |x: usize| -> Vec<usize> {
        let mut v = vec![0; d];
        let mut x = x;
        for i in (0..d).rev() {
            v[i] = x % moduli[i];
            x /= moduli[i];
        }
        v
    };
    let encode = |v: &[usize]| v.iter().zip(moduli).fold(0, |acc, (&x, &m)| acc * m + x % m);
    let apply = |v: &[usize]| -> Vec<usize> {
        (0..d).map(|i| (0..d).map(|j| action[j][i] * v[j]).sum::<usize>() % moduli[i]).collect()
    };
    FiniteGroup::from_fn(n * k, |a, b| {
        let (v1, j1) = (decode(a / k), a % k);
        let (mut v2, j2) = (decode(b / k), b % k);
        for _ in 0..j1 {
            v2 = apply(&v2);
        }
        let sum: Vec<usize> = (0..d).map(|i| v1[i] + v2[i]).collect();
        encode(&sum) * k + (j1 + j2) % k
    })
}

pub fn dihedral(n: usize) -> FiniteGroup {
    semidirect(&[n], &[vec![n - 1]], 2).with_name(&format!("D{n}"))
}

/// Dicyclic group of order `4n`: `⟨a, x | a^{2n}, x² = a^n, x a x⁻¹ = a⁻¹⟩`.
pub fn dicyclic(n: usize) -> FiniteGroup {
    let m = 2 * n;
    FiniteGroup::from_fn(2 * m, |p, q| {
        let (k1, j1, k2, j2) = (p / 2, p % 2, q / 2, q % 2);
        match (j1, j2) {
            (0, j) => ((k1 + k2) % m) * 2 + j,
            (_, 0) => ((k1 + m - k2) % m) * 2 + 1,
            _ => ((k1 + m - k2 + n) % m) * 2,
        }
    })
}

pub fn symmetric4() -> FiniteGroup {
    FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]]).unwrap().with_name("S4")
}

fn named(g: FiniteGroup, name: &str) -> FiniteGroup {
    g.with_name(name)
}

pub const NAMES: &[&str] = &[
    "C1",
    "C2",
    "C3",
    "C4",
    "C2xC2",
    "C5",
    "C6",
    "S3",
    "C7",
    "C8",
    "C4xC2",
    "C2xC2xC2",
    "D4",
    "Q8",
    "C9",
    "C3xC3",
    "C10",
    "D5",
    "C11",
    "C12",
    "C6xC2",
    "A4",
    "D6",
    "Dic3",
    "C13",
    "C14",
    "D7",
    "C15",
    "C16",
    "C4xC4",
    "C8xC2",
    "C4xC2xC2",
    "C2^4",
    "D8",
    "Q16",
    "SD16",
    "M16",
    "C4:C4",
    "(C4xC2):C2",
    "D4xC2",
    "Q8xC2",
    "Pauli",
    "S4",
];

pub fn by_name(name: &str) -> Option<FiniteGroup> {
    let g = match name {
        "C2xC2" => abelian(&[2, 2]),
        "S3" => dihedral(3),
        "C4xC2" => abelian(&[4, 2]),
        "C2xC2xC2" => abelian(&[2, 2, 2]),
        "D4" => dihedral(4),
        "Q8" => dicyclic(2),
        "C3xC3" => abelian(&[3, 3]),
        "D5" => dihedral(5),
        "C6xC2" => abelian(&[6, 2]),
        "A4" => semidirect(&[2, 2], &[vec![0, 1], vec![1, 1]], 3),
        "D6" => dihedral(6),
        "Dic3" => dicyclic(3),
        "D7" => dihedral(7),
        "C4xC4" => abelian(&[4, 4]),
        "C8xC2" => abelian(&[8, 2]),
        "C4xC2xC2" => abelian(&[4, 2, 2]),
        "C2^4" => abelian(&[2, 2, 2, 2]),
        "D8" => dihedral(8),
        "Q16" => dicyclic(4),
        "SD16" => semidirect(&[8], &[vec![3]], 2),
        "M16" => semidirect(&[8], &[vec![5]], 2),
        "C4:C4" => semidirect(&[4], &[vec![3]], 4),
        "(C4xC2):C2" => semidirect(&[4, 2], &[vec![1, 1], vec![0, 1]], 2),
        "D4xC2" => FiniteGroup::direct_product(&dihedral(4), &cyclic(2)),
        "Q8xC2" => FiniteGroup::direct_product(&dicyclic(2), &cyclic(2)),
        "Pauli" => semidirect(&[4, 2], &[vec![1, 0], vec![2, 1]], 2),
        "S4" => symmetric4(),
        _ => {
            let n: usize = name.strip_prefix('C')?.parse().ok()?;
            if n == 0 || n > 16 {
                return None;
            }
            return Some(cyclic(n));
        }
    };
    Some(named(g, name))
}

pub fn all() -> Vec<FiniteGroup> {
    NAMES.iter().map(|n| by_name(n).expect("catalog name")).collect()
}

/// Every group of order `n` in the catalog.
pub fn of_order(n: usize) -> Vec<FiniteGroup> {
    all().into_iter().filter(|g| g.order() == n).collect()
}

use super::{ExactLimits, ExclusivityGraph, Result};

/// All maximal cliques (Bron–Kerbosch with Tomita pivoting). Each clique is
/// sorted and the list is sorted lexicographically. Isolated vertices come
/// out as singletons.
pub fn maximal_cliques(g: &ExclusivityGraph, limits: &ExactLimits) -> Result<Vec<Vec<usize>>> {
    limits.check(g, "maximal_cliques")?;
    let nbr = g.neighbor_masks();
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let mut out = Vec::new();
    bron_kerbosch(&nbr, 0, all, 0, &mut out);
    let mut cliques: Vec<Vec<usize>> = out.into_iter().map(bits).collect();
    cliques.sort();
    Ok(cliques)
}

fn bron_kerbosch(nbr: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 && r != 0 {
            out.push(r);
        }
        return;
    }
    // pivot maximising |P ∩ N(u)| over P ∪ X
    let pivot = bits(p | x)
        .into_iter()
        .max_by_key(|&u| ((p & nbr[u]).count_ones(), std::cmp::Reverse(u)))
        .expect("P is nonempty");
    let mut todo = p & !nbr[pivot];
    while todo != 0 {
        let v = todo.trailing_zeros() as usize;
        todo &= todo - 1;
        let bit = 1u64 << v;
        bron_kerbosch(nbr, r | bit, p & nbr[v], x & nbr[v], out);
        p &= !bit;
        x |= bit;
    }
}

fn bits(mut m: u64) -> Vec<usize> {
    let mut v = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        v.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    v
}

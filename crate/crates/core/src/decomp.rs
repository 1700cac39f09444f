//! The cluster-system decomposition algorithm: slicing, the typical and
//! atypical clique eliminations, and the final repartition into uniform
//! unbalanced tiles, all under a vertex-mass conservation ledger.
//!
//! The system is abstract (cluster sizes and connection tables); every size
//! produced by Steps 1-3 must be a positive integer or the operation aborts
//! before mutating state. The one clique allowed to fail the availability
//! count is discovered during the run and absorbed, mirroring how the
//! exceptional clique is folded into the exceptional vertex set.

use crate::bounds::{self, Phi};
use crate::chromatic::gamma_param;
use crate::cover::{classify_connection, CliqueCover, ConnectionKind};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ratio::{ceil_int, format_rational, rat_usize, Rational};
use num::traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Original,
    Sliced,
    LargePart,
    SmallPart,
}

/// Connection of a smaller clique to one k-clique: the trichotomy class plus
/// the k-clique cluster positions adjacent to every cluster of the smaller
/// clique (what Step 3 picks as B).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConnectionEntry {
    pub kind: ConnectionKindTag,
    #[serde(default)]
    pub fully_adjacent: Vec<usize>,
}

/// Serializable mirror of the cover module's connection trichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionKindTag {
    Well,
    Over,
    Under,
}

impl From<ConnectionKind> for ConnectionKindTag {
    fn from(k: ConnectionKind) -> Self {
        match k {
            ConnectionKind::Well => ConnectionKindTag::Well,
            ConnectionKind::Over => ConnectionKindTag::Over,
            ConnectionKind::Under => ConnectionKindTag::Under,
        }
    }
}

/// One regular clique of the system: ordered cluster sizes plus provenance
/// and its connection table to the order-k cliques.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularClique {
    pub id: usize,
    pub sizes: Vec<u64>,
    #[serde(default = "default_provenance")]
    pub provenance: Provenance,
    /// Typicality (order < k only): over-connected to fewer than c_t k-cliques.
    #[serde(default)]
    pub typical: Option<bool>,
    /// Keyed by k-clique id.
    #[serde(default, with = "connection_map")]
    pub connections: BTreeMap<usize, ConnectionEntry>,
}

fn default_provenance() -> Provenance {
    Provenance::Original
}

/// JSON object keys are strings; the connection table is keyed by clique id.
mod connection_map {
    use super::ConnectionEntry;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<usize, ConnectionEntry>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strmap: BTreeMap<String, &ConnectionEntry> =
            map.iter().map(|(k, v)| (k.to_string(), v)).collect();
        strmap.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<usize, ConnectionEntry>, D::Error> {
        let strmap = BTreeMap::<String, ConnectionEntry>::deserialize(d)?;
        strmap
            .into_iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|k| (k, v))
                    .map_err(|_| serde::de::Error::custom(format!("bad clique id {k:?}")))
            })
            .collect()
    }
}

impl RegularClique {
    pub fn order(&self) -> usize {
        self.sizes.len()
    }

    pub fn mass(&self) -> u128 {
        self.sizes.iter().map(|&s| s as u128).sum()
    }
}

/// Abstract cluster-clique cover: the families Psi_k, ..., Psi_1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterSystem {
    pub k: usize,
    /// Uniform cluster size L of the original cliques.
    pub cluster_size: u64,
    pub cliques: Vec<RegularClique>,
}

impl ClusterSystem {
    /// Number of reduced-graph clusters, ell.
    pub fn ell(&self) -> usize {
        self.cliques.iter().map(|c| c.order()).sum()
    }

    pub fn total_mass(&self) -> u128 {
        self.cliques.iter().map(|c| c.mass()).sum()
    }

    pub fn family_count(&self, order: usize) -> usize {
        self.cliques.iter().filter(|c| c.order() == order).count()
    }

    /// phi vector measured from the family counts.
    pub fn phi(&self) -> Result<Phi> {
        let ell = self.ell();
        if ell == 0 {
            return Err(Error::Precondition("empty system".into()));
        }
        let values: Vec<Rational> = (1..=self.k)
            .map(|i| rat_usize(self.family_count(i)) / rat_usize(ell))
            .collect();
        Phi::from_ascending(values)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Precondition("system order k must be >= 2".into()));
        }
        for c in &self.cliques {
            if c.order() == 0 || c.order() > self.k {
                return Err(Error::Precondition(format!(
                    "clique {} has order {} outside [1,{}]",
                    c.id,
                    c.order(),
                    self.k
                )));
            }
            if c.sizes.iter().any(|&s| s == 0) {
                return Err(Error::Precondition(format!("clique {} has an empty cluster", c.id)));
            }
        }
        let mut ids: Vec<usize> = self.cliques.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.cliques.len() {
            return Err(Error::Precondition("duplicate clique ids".into()));
        }
        Ok(())
    }

    pub fn clique(&self, id: usize) -> Result<&RegularClique> {
        self.cliques
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::Precondition(format!("no clique with id {id}")))
    }

    /// System induced by a clique cover of a reduced graph: one regular
    /// clique per cover clique, all clusters of size L, connection tables
    /// measured on the reduced graph.
    pub fn from_reduced_cover(r: &Graph, cover: &CliqueCover, l: u64) -> Result<ClusterSystem> {
        let k = cover.k;
        let mut cliques = Vec::new();
        let mut verts_of: Vec<Vec<usize>> = Vec::new();
        for order in (1..=k).rev() {
            for c in cover.family(order) {
                let id = cliques.len();
                cliques.push(RegularClique {
                    id,
                    sizes: vec![l; order],
                    provenance: Provenance::Original,
                    typical: None,
                    connections: BTreeMap::new(),
                });
                verts_of.push(c.clone());
            }
        }
        let k_ids: Vec<usize> = (0..cliques.len()).filter(|&i| cliques[i].order() == k).collect();
        for i in 0..cliques.len() {
            if cliques[i].order() == k {
                continue;
            }
            let mut table = BTreeMap::new();
            for &kid in &k_ids {
                let cc = classify_connection(r, &verts_of[i], &verts_of[kid])?;
                let fully_adjacent: Vec<usize> = verts_of[kid]
                    .iter()
                    .enumerate()
                    .filter(|(_, &u)| verts_of[i].iter().all(|&v| r.has_edge(u, v)))
                    .map(|(pos, _)| pos)
                    .collect();
                table.insert(kid, ConnectionEntry { kind: cc.kind.into(), fully_adjacent });
            }
            cliques[i].connections = table;
        }
        let sys = ClusterSystem { k, cluster_size: l, cliques };
        sys.validate()?;
        Ok(sys)
    }
}

/// Even s-partition of one clique: each cluster size divided by s, labels
/// inherited, provenance `sliced`. Pure (returns the updated system).
pub fn s_partition(system: &ClusterSystem, clique_id: usize, s: u64) -> Result<ClusterSystem> {
    if s == 0 {
        return Err(Error::Precondition("partition arity must be positive".into()));
    }
    let target = system.clique(clique_id)?.clone();
    if target.sizes.iter().any(|&sz| sz % s != 0) {
        return Err(Error::NonIntegral(format!(
            "cluster sizes {:?} not divisible by {s}",
            target.sizes
        )));
    }
    if s == 1 {
        return Ok(system.clone());
    }
    let mut out = system.clone();
    out.cliques.retain(|c| c.id != clique_id);
    let mut next_id = system.cliques.iter().map(|c| c.id).max().unwrap_or(0) + 1;
    for _ in 0..s {
        out.cliques.push(RegularClique {
            id: next_id,
            sizes: target.sizes.iter().map(|&sz| sz / s).collect(),
            provenance: Provenance::Sliced,
            typical: target.typical,
            connections: target.connections.clone(),
        });
        next_id += 1;
    }
    out.cliques.sort_by_key(|c| c.id);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EliminationMode {
    /// Step 2: uses well-connected k-cliques.
    Typical,
    /// Step 3: uses over-connected k-cliques and picks B from the
    /// fully-adjacent clusters.
    Atypical,
}

/// Tiles R^{alpha'}(width), `count` of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TileProfile {
    pub width: u64,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerEntry {
    pub step: u8,
    pub what: String,
    pub consumed: u128,
    pub produced: u128,
}

/// The integer quantities of one elimination of a clique of order k - i
/// against pool sub-cliques of cluster size l_prime.
#[derive(Clone, Debug)]
pub struct EliminationArithmetic {
    pub i: usize,
    pub t1: u64,
    pub t2: u64,
    pub v_large: u64,
    pub v_small: u64,
    /// it2, removed from each cluster of K per round.
    pub per_round_consumption: u64,
    pub rounds: u64,
}

/// Validates every division of Steps 2-3 for order k-i at pool cluster size
/// l_prime, with alpha' = p/q; errors name the non-integral quantity.
pub fn elimination_arithmetic(
    k: usize,
    i: usize,
    l: u64,
    l_prime: u64,
    p: u64,
    q: u64,
) -> Result<EliminationArithmetic> {
    if i < 1 || i >= k {
        return Err(Error::Precondition(format!("elimination index {i} outside [1,{}]", k - 1)));
    }
    // intermediates in u128: minimal valid L can reach 62 bits on the
    // k = 4 grid points
    let (iu, l, l_prime, p, q) = (i as u128, l as u128, l_prime as u128, p as u128, q as u128);
    let check = |num: u128, den: u128, what: &str| -> Result<u64> {
        if num % den != 0 {
            return Err(Error::NonIntegral(format!("{what} = {num}/{den}")));
        }
        Ok((num / den).try_into().map_err(|_| Error::Precondition(format!("{what} overflows")))?)
    };
    let t1 = check(l_prime, iu, "t1 = L'/i")?;
    check(p * t1 as u128, q, "alpha' t1")?;
    let m = iu * ((iu - 1) * q + p);
    let t2 = check((q - p) * l_prime, m, "t2 = (1-alpha')L'/(i(i-1+alpha'))")?;
    check(p * t2 as u128, q, "alpha' t2")?;
    let v_large = check(((iu - 1) * q + p) * l_prime, iu * q, "V_large = (i-1+alpha')L'/i")?;
    let v_small = check((q - p) * l_prime, iu * q, "V_small = (1-alpha')L'/i")?;
    if v_large + v_small != l_prime as u64 {
        return Err(Error::Lemma("V_large + V_small must reassemble the cluster".into()));
    }
    let per_round_consumption = iu as u64 * t2;
    let rounds = check(((iu - 1) * q + p) * l, (q - p) * l_prime, "round count")?;
    if rounds as u128 * per_round_consumption as u128 != l {
        return Err(Error::Lemma("rounds times per-round consumption must equal L".into()));
    }
    Ok(EliminationArithmetic { i, t1, t2, v_large, v_small, per_round_consumption, rounds })
}

/// Mass of one R^{alpha'}(t) tile: (k-1)t + alpha' t; t must be divisible
/// by q.
fn tile_mass(k: usize, t: u64, p: u64, q: u64) -> u128 {
    debug_assert!(t % q == 0);
    (k as u128 - 1) * t as u128 + (p as u128) * (t as u128 / q as u128)
}

fn rational_pq(alpha_prime: &Rational) -> Result<(u64, u64)> {
    let p = alpha_prime
        .numer()
        .to_u64()
        .ok_or_else(|| Error::Precondition("alpha' numerator too large".into()))?;
    let q = alpha_prime
        .denom()
        .to_u64()
        .ok_or_else(|| Error::Precondition("alpha' denominator too large".into()))?;
    if p == 0 || p >= q {
        return Err(Error::Precondition("alpha' must lie strictly in (0,1)".into()));
    }
    Ok((p, q))
}

/// Converts one clique of order k-i into unbalanced tiles, consuming one
/// pool k-clique per round. Pool entries must be connected to the clique in
/// the mode's class; atypical mode additionally requires >= i fully-adjacent
/// clusters for B. Every division is validated before any accounting.
pub fn eliminate_clique(
    system: &ClusterSystem,
    clique_id: usize,
    pool: &[usize],
    alpha_prime: &Rational,
    mode: EliminationMode,
) -> Result<(Vec<TileProfile>, Vec<LedgerEntry>)> {
    system.validate()?;
    let k = system.k;
    let target = system.clique(clique_id)?;
    let i = k - target.order();
    if i == 0 {
        return Err(Error::Precondition("cannot eliminate an order-k clique".into()));
    }
    if target.sizes.iter().any(|&s| s != system.cluster_size) {
        return Err(Error::Precondition("eliminated clique must have original size L".into()));
    }
    let (p, q) = rational_pq(alpha_prime)?;
    let l = system.cluster_size;
    let mut l_prime: Option<u64> = None;
    for &pid in pool {
        let pc = system.clique(pid)?;
        if pc.order() != k {
            return Err(Error::Precondition(format!("pool clique {pid} is not order k")));
        }
        let sz = pc.sizes[0];
        if pc.sizes.iter().any(|&s| s != sz) {
            return Err(Error::Precondition(format!("pool clique {pid} is not balanced")));
        }
        if *l_prime.get_or_insert(sz) != sz {
            return Err(Error::Precondition("pool cluster sizes differ".into()));
        }
        let entry = target.connections.get(&pid).ok_or_else(|| {
            Error::Precondition(format!("no connection entry for pool clique {pid}"))
        })?;
        match (mode, entry.kind) {
            (EliminationMode::Typical, ConnectionKindTag::Well) => {}
            (EliminationMode::Atypical, ConnectionKindTag::Over) => {
                if entry.fully_adjacent.len() < i {
                    return Err(Error::Lemma(format!(
                        "over-connected clique {pid} offers only {} fully-adjacent clusters, \
                         Step 3 needs {i}",
                        entry.fully_adjacent.len()
                    )));
                }
            }
            _ => {
                return Err(Error::Precondition(format!(
                    "pool clique {pid} has the wrong connection class for this mode"
                )))
            }
        }
    }
    let l_prime = l_prime
        .ok_or_else(|| Error::Precondition("empty pool".into()))?;
    let arith = elimination_arithmetic(k, i, l, l_prime, p, q)?;
    if pool.len() as u64 != arith.rounds {
        return Err(Error::Precondition(format!(
            "pool supplies {} k-cliques, elimination needs exactly {}",
            pool.len(),
            arith.rounds
        )));
    }
    // per pooled k-clique: i tiles of width t1 and i tiles of width t2
    let count = arith.rounds * i as u64;
    let products = vec![
        TileProfile { width: arith.t1, count },
        TileProfile { width: arith.t2, count },
    ];
    let consumed = arith.rounds as u128
        * (k as u128 * l_prime as u128
            + (k - i) as u128 * arith.per_round_consumption as u128);
    let produced = count as u128 * (tile_mass(k, arith.t1, p, q) + tile_mass(k, arith.t2, p, q));
    if consumed != produced {
        return Err(Error::Lemma(format!(
            "elimination of clique {clique_id} lost mass: consumed {consumed}, produced {produced}"
        )));
    }
    let step = match mode {
        EliminationMode::Typical => 2,
        EliminationMode::Atypical => 3,
    };
    let ledger = vec![LedgerEntry {
        step,
        what: format!(
            "clique {clique_id} (order {}) via {} pool k-cliques: {}x R({}) + {}x R({})",
            k - i,
            arith.rounds,
            count,
            arith.t1,
            count,
            arith.t2
        ),
        consumed,
        produced,
    }];
    Ok((products, ledger))
}

/// Availability audit row for one elimination order.
#[derive(Clone, Debug, Serialize)]
pub struct AvailabilityRow {
    pub i: usize,
    /// min |Lambda(K)| / ell over typical cliques of order k-i.
    pub lambda_min: String,
    /// Slack of the availability inequality at that lambda.
    pub slack: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCertificate {
    pub k: usize,
    pub l: u64,
    pub l_prime: u64,
    pub l1: u64,
    #[serde(with = "crate::ratio::serde_rational")]
    pub alpha_prime: Rational,
    /// Unbalanced tiles produced by Steps 2-3, plus balanced pool remainder
    /// split in Step 4: width -> count before the final L1 split.
    pub tiles_pre_split: Vec<TileProfile>,
    pub final_tile_count: u64,
    #[serde(with = "crate::ratio::serde_rational")]
    pub realized_c: Rational,
    /// The single clique absorbed for failing availability, if any.
    pub absorbed_clique: Option<usize>,
    pub absorbed_mass: u128,
    /// initial mass - tiles - absorbed; must be 0.
    pub residue: i128,
    pub ledger: Vec<LedgerEntry>,
    pub availability: Vec<AvailabilityRow>,
}

/// Divisor of L' forced by the eliminations of order k-i and the Step 4
/// rotation, with alpha' = p/q.
fn l_prime_divisor(i: u64, p: u64, q: u64) -> u128 {
    let a = (q * i) as u128; // t1 and alpha' t1
    let m = (i * ((i - 1) * q + p)) as u128;
    let b = {
        // q*m / gcd(q*m, q-p): t2 integral and divisible by q
        let qm = q as u128 * m;
        qm / gcd_u128(qm, (q - p) as u128)
    };
    lcm_u128(a, b)
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    a / gcd_u128(a, b) * b
}

/// The smallest cluster size L making every division of the algorithm
/// integral for the given set of present clique orders.
pub fn minimal_valid_l(
    k: usize,
    alpha: &Rational,
    mu: &Rational,
    orders_present: &[usize],
) -> Result<u64> {
    let (a_prime, _, _) = bounds::alpha_prime(alpha, k, mu)?;
    let (p, q) = rational_pq(&a_prime)?;
    let v = ((k as u64 - 1) * q + p) as u128; // Step 4 rotation divisor
    let mut lp: u128 = v;
    for &order in orders_present {
        if order == 0 || order >= k {
            continue;
        }
        let i = (k - order) as u64;
        lp = lcm_u128(lp, l_prime_divisor(i, p, q));
    }
    let l = lp * (q - p) as u128;
    l.try_into()
        .map_err(|_| Error::Precondition("minimal valid L overflows u64".into()))
}

/// Runs the full decomposition: slice the k-cliques, eliminate every typical
/// clique with well-connected pool members and every atypical clique with
/// its reserved over-connected ones, then split everything into uniform
/// R^{alpha'}(L1) tiles. The certificate carries the conservation ledger
/// (residue must be 0) and the availability audit.
pub fn run_decomposition(
    system: &ClusterSystem,
    alpha: &Rational,
    mu: &Rational,
) -> Result<DecompositionCertificate> {
    system.validate()?;
    let k = system.k;
    let l = system.cluster_size;
    let ell = system.ell();
    let phi = system.phi()?;
    let gamma = gamma_param(k, alpha);
    let s = bounds::s_param(&phi, &gamma);
    if &s < mu {
        return Err(Error::Precondition(format!(
            "decomposition requires s >= mu: s = {}, mu = {}",
            format_rational(&s),
            format_rational(mu)
        )));
    }
    let (a_prime, _, _) = bounds::alpha_prime(alpha, k, mu)?;
    let (p, q) = rational_pq(&a_prime)?;
    let c_t = bounds::typicality_threshold(&a_prime, k)?;
    if l % (q - p) != 0 {
        return Err(Error::NonIntegral(format!("L' = L/(q-p) = {l}/{}", q - p)));
    }
    let l_prime = l / (q - p);
    // all original cliques must be uniform at L
    for c in &system.cliques {
        if c.sizes.iter().any(|&sz| sz != l) {
            return Err(Error::Precondition(format!(
                "clique {} is not uniform at L = {l}",
                c.id
            )));
        }
    }

    // typicality routing and exclusivity reservations
    let k_ids: Vec<usize> =
        system.cliques.iter().filter(|c| c.order() == k).map(|c| c.id).collect();
    let smaller: Vec<&RegularClique> =
        system.cliques.iter().filter(|c| c.order() < k).collect();
    let mut reserved_by: BTreeMap<usize, usize> = BTreeMap::new(); // k-clique -> atypical clique
    let mut typical_ids = Vec::new();
    let mut atypical_ids = Vec::new();
    for c in &smaller {
        let over: Vec<usize> = c
            .connections
            .iter()
            .filter(|(_, e)| e.kind == ConnectionKindTag::Over)
            .map(|(&kid, _)| kid)
            .collect();
        if (over.len() as u64) < c_t {
            typical_ids.push(c.id);
        } else {
            atypical_ids.push(c.id);
            for kid in over {
                if let Some(prev) = reserved_by.insert(kid, c.id) {
                    return Err(Error::Lemma(format!(
                        "k-clique {kid} over-connected to two atypical cliques ({prev}, {})",
                        c.id
                    )));
                }
            }
        }
    }

    // availability audit per order present
    let mut availability = Vec::new();
    for i in 1..k {
        let order = k - i;
        let members: Vec<&&RegularClique> =
            smaller.iter().filter(|c| c.order() == order && typical_ids.contains(&c.id)).collect();
        if members.is_empty() {
            continue;
        }
        let lambda_min = members
            .iter()
            .map(|c| {
                let well = c
                    .connections
                    .values()
                    .filter(|e| e.kind == ConnectionKindTag::Well)
                    .count();
                rat_usize(well) / rat_usize(ell)
            })
            .min()
            .expect("nonempty");
        let rep = bounds::feasibility_ii(i, &lambda_min, &phi, alpha, &a_prime)?;
        availability.push(AvailabilityRow {
            i,
            lambda_min: format_rational(&lambda_min),
            slack: format_rational(&rep.slack),
            holds: rep.holds,
        });
    }

    // Step 1: (q-p)-partition of every k-clique; pool entries remember their
    // parent for connection lookups
    let mut ledger: Vec<LedgerEntry> = Vec::new();
    ledger.push(LedgerEntry {
        step: 1,
        what: format!("{}-partition of {} k-cliques at L' = {l_prime}", q - p, k_ids.len()),
        consumed: 0,
        produced: 0,
    });
    struct PoolEntry {
        parent: usize,
        consumed: bool,
    }
    let mut pool: Vec<PoolEntry> = Vec::new();
    for &kid in &k_ids {
        for _ in 0..(q - p) {
            pool.push(PoolEntry { parent: kid, consumed: false });
        }
    }

    let mut tiles: BTreeMap<u64, u64> = BTreeMap::new();
    let mut absorbed_clique: Option<usize> = None;
    let mut absorbed_mass: u128 = 0;

    // Steps 2-3, processed per elimination order ascending i (largest
    // smaller cliques first), cliques in ascending id
    for i in 1..k {
        let order = k - i;
        let arith = if smaller.iter().any(|c| c.order() == order) {
            elimination_arithmetic(k, i, l, l_prime, p, q)?
        } else {
            continue;
        };
        for pass in [EliminationMode::Typical, EliminationMode::Atypical] {
            let ids: &[usize] = match pass {
                EliminationMode::Typical => &typical_ids,
                EliminationMode::Atypical => &atypical_ids,
            };
            let mut members: Vec<usize> = ids
                .iter()
                .copied()
                .filter(|&id| system.clique(id).unwrap().order() == order)
                .collect();
            members.sort_unstable();
            for id in members {
                let target = system.clique(id)?;
                let want_kind = match pass {
                    EliminationMode::Typical => ConnectionKindTag::Well,
                    EliminationMode::Atypical => ConnectionKindTag::Over,
                };
                // gather unconsumed pool entries whose parent has the right
                // connection class and reservation, ascending pool index
                let mut chosen: Vec<usize> = Vec::new();
                for (idx, entry) in pool.iter().enumerate() {
                    if chosen.len() as u64 == arith.rounds {
                        break;
                    }
                    if entry.consumed {
                        continue;
                    }
                    let conn = target.connections.get(&entry.parent);
                    let class_ok = conn.map_or(false, |e| e.kind == want_kind);
                    if !class_ok {
                        continue;
                    }
                    let reservation_ok = match pass {
                        EliminationMode::Typical => !reserved_by.contains_key(&entry.parent),
                        EliminationMode::Atypical => reserved_by.get(&entry.parent) == Some(&id),
                    };
                    if !reservation_ok {
                        continue;
                    }
                    if pass == EliminationMode::Atypical {
                        let fa = &conn.unwrap().fully_adjacent;
                        if fa.len() < i {
                            return Err(Error::Lemma(format!(
                                "over-connected k-clique {} offers {} fully-adjacent clusters, \
                                 Step 3 needs {i}",
                                entry.parent,
                                fa.len()
                            )));
                        }
                    }
                    chosen.push(idx);
                }
                if (chosen.len() as u64) < arith.rounds {
                    match pass {
                        EliminationMode::Typical if absorbed_clique.is_none() => {
                            // the single exceptional clique: absorbed whole
                            absorbed_clique = Some(id);
                            absorbed_mass += target.mass();
                            ledger.push(LedgerEntry {
                                step: 2,
                                what: format!(
                                    "clique {id} absorbed as the exceptional clique \
                                     ({} of {} pool k-cliques available)",
                                    chosen.len(),
                                    arith.rounds
                                ),
                                consumed: target.mass(),
                                produced: 0,
                            });
                            continue;
                        }
                        EliminationMode::Typical => {
                            return Err(Error::Lemma(format!(
                                "availability failed twice: clique {id} needs {} well-connected \
                                 pool k-cliques, found {}",
                                arith.rounds,
                                chosen.len()
                            )));
                        }
                        EliminationMode::Atypical => {
                            return Err(Error::Lemma(format!(
                                "atypical clique {id} needs {} over-connected pool k-cliques, \
                                 found {} (c_t = {c_t})",
                                arith.rounds,
                                chosen.len()
                            )));
                        }
                    }
                }
                let count = arith.rounds * i as u64;
                *tiles.entry(arith.t1).or_default() += count;
                *tiles.entry(arith.t2).or_default() += count;
                let consumed = arith.rounds as u128
                    * (k as u128 * l_prime as u128
                        + (k - i) as u128 * arith.per_round_consumption as u128);
                let produced =
                    count as u128 * (tile_mass(k, arith.t1, p, q) + tile_mass(k, arith.t2, p, q));
                if consumed != produced {
                    return Err(Error::Lemma(format!(
                        "elimination of clique {id} lost mass: {consumed} vs {produced}"
                    )));
                }
                ledger.push(LedgerEntry {
                    step: if pass == EliminationMode::Typical { 2 } else { 3 },
                    what: format!(
                        "clique {id} (order {order}) via {} pool k-cliques: {count}x R({}) \
                         + {count}x R({})",
                        arith.rounds, arith.t1, arith.t2
                    ),
                    consumed,
                    produced,
                });
                for idx in chosen {
                    pool[idx].consumed = true;
                }
            }
        }
    }

    // Step 4: uniform width L1 over leftover balanced pool cliques and all
    // unbalanced tiles
    let v = (k as u64 - 1) * q + p;
    let balanced_left = pool.iter().filter(|e| !e.consumed).count() as u64;
    let q_lp = q as u128 * l_prime as u128;
    if balanced_left > 0 && q_lp % v as u128 != 0 {
        return Err(Error::NonIntegral(format!("rotation groups qL'/v = {q_lp}/{v}")));
    }
    let mut l1: u64 = if balanced_left > 0 {
        (q_lp / v as u128)
            .try_into()
            .map_err(|_| Error::Precondition("rotation width overflows".into()))?
    } else {
        0
    };
    for &t in tiles.keys() {
        l1 = gcd_u64(l1, t);
    }
    if l1 == 0 {
        return Err(Error::Precondition("nothing to decompose".into()));
    }
    let mut final_tile_count: u64 = 0;
    for (&t, &c) in &tiles {
        final_tile_count += c * (t / l1);
    }
    if balanced_left > 0 {
        let groups: u64 = (q_lp / (v as u128 * l1 as u128))
            .try_into()
            .map_err(|_| Error::Precondition("group count overflows".into()))?;
        let from_balanced = balanced_left * (k as u64) * groups;
        ledger.push(LedgerEntry {
            step: 4,
            what: format!(
                "{balanced_left} balanced pool cliques rotated into {from_balanced} x R({l1})"
            ),
            consumed: balanced_left as u128 * k as u128 * l_prime as u128,
            produced: from_balanced as u128 * tile_mass(k, l1, p, q),
        });
        final_tile_count += from_balanced;
    }
    ledger.push(LedgerEntry {
        step: 4,
        what: format!("final factor: {final_tile_count} x R^{{alpha'}}({l1})"),
        consumed: 0,
        produced: 0,
    });

    let final_mass = final_tile_count as u128 * tile_mass(k, l1, p, q);
    let residue = system.total_mass() as i128 - final_mass as i128 - absorbed_mass as i128;
    let realized_c = rat_usize(l1 as usize) / (mu * rat_usize(l as usize));
    let tiles_pre_split: Vec<TileProfile> =
        tiles.into_iter().map(|(width, count)| TileProfile { width, count }).collect();
    let cert = DecompositionCertificate {
        k,
        l,
        l_prime,
        l1,
        alpha_prime: a_prime,
        tiles_pre_split,
        final_tile_count,
        realized_c,
        absorbed_clique,
        absorbed_mass,
        residue,
        ledger,
        availability,
    };
    if cert.residue != 0 {
        return Err(Error::Lemma(format!("conservation failed: residue {}", cert.residue)));
    }
    Ok(cert)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Balanced-case decomposition of a reduced graph: a K_k-tiling via the
/// padding construction with s = ceil((d + 2 eps) ell); uncovered clusters
/// become exceptional.
#[derive(Clone, Debug)]
pub struct BalancedDecomposition {
    /// k-subsets of cluster ids, each a balanced regular k-clique.
    pub tiles: Vec<Vec<usize>>,
    pub exceptional_clusters: Vec<usize>,
    pub s_used: usize,
    /// The lemma guarantee k(k-1)s_used + (k-1)^2 (always enforced).
    pub cluster_bound: u64,
    /// count <= k(k-1)(d+2eps) ell + (k-1)^2, with the rational s.
    pub rational_bound_ok: bool,
    /// mass <= 2 k^2 d n when eps <= d (None when eps > d).
    pub mass_bound_ok: Option<bool>,
}

pub fn run_balanced_decomposition(
    r: &Graph,
    k: usize,
    l: u64,
    d: &Rational,
    eps: &Rational,
    budget: u64,
) -> Result<BalancedDecomposition> {
    let ell = r.n();
    let s_rat = (d + rat_usize(2) * eps) * rat_usize(ell);
    let s_used: usize = (&ceil_int(&s_rat))
        .try_into()
        .map_err(|_| Error::Precondition("s overflows".into()))?;
    let tiling = crate::tiling::kk_tiling_padded(r, k, s_used, budget)?;
    let cluster_bound = (k * (k - 1) * s_used + (k - 1) * (k - 1)) as u64;
    let uncovered = tiling.leftover.len();
    if uncovered as u64 > cluster_bound {
        return Err(Error::Lemma(format!(
            "balanced decomposition left {uncovered} clusters, bound {cluster_bound}"
        )));
    }
    let rational_bound =
        rat_usize(k * (k - 1)) * &s_rat + rat_usize((k - 1) * (k - 1));
    let rational_bound_ok = rat_usize(uncovered) <= rational_bound;
    let mass_bound_ok = if eps <= d {
        let n = rat_usize(ell) * rat_usize(l as usize);
        let mass = rat_usize(uncovered) * rat_usize(l as usize);
        Some(mass <= rat_usize(2 * k * k) * d * n)
    } else {
        None
    };
    Ok(BalancedDecomposition {
        tiles: tiling.copies,
        exceptional_clusters: tiling.leftover,
        s_used,
        cluster_bound,
        rational_bound_ok,
        mass_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    /// Reduced graph: `nk` disjoint K_k's plus `extra` cliques of order
    /// `small_order`, every small-clique vertex wired to exactly k-1
    /// vertices of every K_k (well-connected everywhere).
    fn synthetic_reduced(k: usize, nk: usize, small_order: usize, extra: usize) -> (Graph, Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let n = nk * k + extra * small_order;
        let mut g = Graph::empty(n);
        let mut kcliques = Vec::new();
        for b in 0..nk {
            let verts: Vec<usize> = (b * k..(b + 1) * k).collect();
            for i in 0..k {
                for j in i + 1..k {
                    g.add_edge(verts[i], verts[j]);
                }
            }
            kcliques.push(verts);
        }
        let base = nk * k;
        let mut smalls = Vec::new();
        for e in 0..extra {
            let verts: Vec<usize> = (base + e * small_order..base + (e + 1) * small_order).collect();
            for i in 0..small_order {
                for j in i + 1..small_order {
                    g.add_edge(verts[i], verts[j]);
                }
            }
            // each small vertex adjacent to the first k-1 vertices of each K_k
            for &v in &verts {
                for kc in &kcliques {
                    for &u in &kc[..k - 1] {
                        g.add_edge(v, u);
                    }
                }
            }
            smalls.push(verts);
        }
        (g, kcliques, smalls)
    }

    fn system_from_parts(
        k: usize,
        l: u64,
        g: &Graph,
        kcliques: &[Vec<usize>],
        smalls: &[Vec<usize>],
    ) -> ClusterSystem {
        let cliques: Vec<Vec<usize>> =
            kcliques.iter().chain(smalls.iter()).cloned().collect();
        let cover = CliqueCover::new(g, k, cliques, false).unwrap();
        ClusterSystem::from_reduced_cover(g, &cover, l).unwrap()
    }

    #[test]
    fn s_partition_basics() {
        let sys = ClusterSystem {
            k: 3,
            cluster_size: 12,
            cliques: vec![RegularClique {
                id: 0,
                sizes: vec![12, 12, 12],
                provenance: Provenance::Original,
                typical: None,
                connections: BTreeMap::new(),
            }],
        };
        let out = s_partition(&sys, 0, 3).unwrap();
        assert_eq!(out.cliques.len(), 3);
        assert!(out.cliques.iter().all(|c| c.sizes == vec![4, 4, 4]));
        assert!(out.cliques.iter().all(|c| c.provenance == Provenance::Sliced));
        // identity
        let same = s_partition(&sys, 0, 1).unwrap();
        assert_eq!(same.cliques.len(), 1);
        assert!(matches!(s_partition(&sys, 0, 5), Err(Error::NonIntegral(_))));
    }

    #[test]
    fn step2_arithmetic_example() {
        // k=3, i=1, alpha'=1/2, L'=12: V_large = 6, V_small = 6, t1 = 12,
        // t2 = 12, per-round consumption 12
        let a = elimination_arithmetic(3, 1, 12, 12, 1, 2).unwrap();
        assert_eq!(a.t1, 12);
        assert_eq!(a.t2, 12);
        assert_eq!(a.v_large, 6);
        assert_eq!(a.v_small, 6);
        assert_eq!(a.per_round_consumption, 12);
        assert_eq!(a.v_large + a.v_small, 12);
    }

    #[test]
    fn minimal_l_is_valid_across_grid() {
        for (k, alpha, mu) in [
            (3usize, rat(1, 2), rat(1, 1)),
            (3, rat(1, 2), rat(1, 10)),
            (3, rat(1, 3), rat(1, 10)),
            (4, rat(2, 3), rat(1, 10)),
            (4, rat(1, 3), rat(1, 1)),
        ] {
            let orders: Vec<usize> = (1..k).collect();
            let l = minimal_valid_l(k, &alpha, &mu, &orders).unwrap();
            let (ap, _, _) = bounds::alpha_prime(&alpha, k, &mu).unwrap();
            let (p, q) = rational_pq(&ap).unwrap();
            assert_eq!(l % (q - p), 0);
            let lp = l / (q - p);
            for i in 1..k {
                elimination_arithmetic(k, i, l, lp, p, q).unwrap();
            }
            assert_eq!((q * lp) % ((k as u64 - 1) * q + p), 0);
        }
    }

    #[test]
    fn full_run_only_k_cliques() {
        // Steps 2-3 vacuous; Step 4 rotates balanced cliques, residue 0
        let (g, kc, sm) = synthetic_reduced(3, 3, 2, 0);
        let alpha = rat(1, 2);
        let mu = rat(1, 10);
        let l = minimal_valid_l(3, &alpha, &mu, &[]).unwrap();
        let sys = system_from_parts(3, l, &g, &kc, &sm);
        let cert = run_decomposition(&sys, &alpha, &mu).unwrap();
        assert_eq!(cert.residue, 0);
        assert!(cert.final_tile_count > 0);
        assert!(cert.absorbed_clique.is_none());
        // all mass in uniform tiles
        let (p, q) = rational_pq(&cert.alpha_prime).unwrap();
        assert_eq!(
            cert.final_tile_count as u128 * tile_mass(3, cert.l1, p, q),
            sys.total_mass()
        );
    }

    #[test]
    fn full_run_with_small_cliques() {
        // phi_3 = 1/3 regime: s = 1/3*3... with enough K_3's, s >= mu holds
        let (g, kc, sm) = synthetic_reduced(3, 8, 2, 1);
        let alpha = rat(1, 2);
        let mu = rat(1, 10);
        let l = minimal_valid_l(3, &alpha, &mu, &[2]).unwrap();
        let sys = system_from_parts(3, l, &g, &kc, &sm);
        // sanity: s >= mu
        let phi = sys.phi().unwrap();
        let gamma = gamma_param(3, &alpha);
        assert!(bounds::s_param(&phi, &gamma) >= mu);
        let cert = run_decomposition(&sys, &alpha, &mu).unwrap();
        assert_eq!(cert.residue, 0);
        assert!(cert.availability.iter().all(|a| a.holds));
        // ledger conservation per entry
        for e in &cert.ledger {
            if e.step == 2 || e.step == 3 {
                assert!(e.consumed == e.produced || e.produced == 0);
            }
        }
    }

    #[test]
    fn run_rejects_extremal_regime() {
        // only small cliques: phi_k = 0 forces s < 0 < mu
        let (g, kc, sm) = synthetic_reduced(3, 1, 2, 6);
        let sys = system_from_parts(3, 360, &g, &kc, &sm);
        let err = run_decomposition(&sys, &rat(1, 2), &rat(1, 10));
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn eliminate_clique_pool_checks() {
        let (g, kc, sm) = synthetic_reduced(3, 4, 2, 1);
        let alpha = rat(1, 2);
        let mu = rat(1, 1);
        let l = minimal_valid_l(3, &alpha, &mu, &[2]).unwrap();
        let sys = system_from_parts(3, l, &g, &kc, &sm);
        let (ap, _, _) = bounds::alpha_prime(&alpha, 3, &mu).unwrap();
        // the small clique has id 4 (after the four K_3s)
        let small_id = sys.cliques.iter().find(|c| c.order() == 2).unwrap().id;
        // wrong pool count
        let err = eliminate_clique(&sys, small_id, &[0], &ap, EliminationMode::Typical);
        assert!(err.is_err());
    }

    #[test]
    fn balanced_decomposition_complete_reduced() {
        let bd =
            run_balanced_decomposition(&Graph::complete(6), 3, 10, &rat(1, 100), &rat(0, 1), 1 << 20)
                .unwrap();
        assert_eq!(bd.tiles.len(), 2);
        assert!(bd.exceptional_clusters.is_empty());
        assert!(bd.rational_bound_ok);
        assert_eq!(bd.mass_bound_ok, Some(true));
    }

    #[test]
    fn balanced_decomposition_c5() {
        let bd =
            run_balanced_decomposition(&Graph::cycle(5), 2, 10, &rat(1, 10), &rat(0, 1), 1 << 20)
                .unwrap();
        // padding with s = ceil(0.5) = 1: leftover <= 2*1*1+1 = 3
        assert!(bd.exceptional_clusters.len() <= 3);
        assert_eq!(bd.s_used, 1);
    }
}

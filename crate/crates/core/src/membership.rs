/// Distances below this are treated as coincidence with a prototype.
pub(crate) const ZERO_DISTANCE: f64 = 1e-12;

/// Fuzzy memberships of one object to a set of prototypes given its
/// Euclidean distances to them:
/// `u_i = 1 / sum_j (d_i / d_j)^(2 / (m - 1))`.
///
/// An object sitting on a prototype gets membership 1 for the lowest-indexed
/// such prototype and 0 elsewhere.
pub(crate) fn memberships_from_distances(distances: &[f64], fuzzifier: f64, out: &mut [f64]) {
    debug_assert_eq!(distances.len(), out.len());
    if let Some(hit) = distances.iter().position(|&d| d < ZERO_DISTANCE) {
        out.fill(0.0);
        out[hit] = 1.0;
        return;
    }
    let exponent = 2.0 / (fuzzifier - 1.0);
    let nearest = distances.iter().copied().fold(f64::INFINITY, f64::min);
    // ratios relative to the nearest prototype stay in (0, 1]
    let mut total = 0.0;
    for (o, &d) in out.iter_mut().zip(distances) {
        *o = (nearest / d).powf(exponent);
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
}

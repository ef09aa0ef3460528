#include "dtwin/dynamics/classify.hpp"

#include "dtwin/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dtwin::dynamics {

double dtw_distance(const PositionSeries& a, const PositionSeries& b, std::optional<std::size_t> band) {
    const std::size_t n = a.points.size();
    const std::size_t m = b.points.size();
    if (n == 0 || m == 0) fail(ErrorCode::EmptySeries, "dtw_distance needs two non-empty series");
    const std::size_t diff = n > m ? n - m : m - n;
    if (band && *band < diff) {
        fail(ErrorCode::BandTooNarrow, "band " + std::to_string(*band) + " is narrower than the length difference " +
                                           std::to_string(diff));
    }
    const std::size_t w = band ? *band : std::max(n, m);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Rolling rows over j = 0..m with a sentinel column 0.
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        std::fill(cur.begin(), cur.end(), inf);
        const std::size_t j_lo = i > w ? i - w : 1;
        const std::size_t j_hi = std::min(m, i + w);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            const double cost = distance(a.points[i - 1].position, b.points[j - 1].position);
            cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

NnModel knn_train(std::vector<LabeledSeries> labeledSegments, DtwConfig config) {
    if (labeledSegments.empty()) fail(ErrorCode::EmptyTrainingSet, "no labeled training series");
    for (const auto& s : labeledSegments) {
        if (s.series.points.empty()) {
            fail(ErrorCode::EmptyTrainingSet, "training series for label '" + s.label + "' is empty");
        }
    }
    return NnModel{std::move(labeledSegments), config};
}

Classification knn_classify(const NnModel& model, const PositionSeries& query) {
    if (model.training.empty()) fail(ErrorCode::EmptyTrainingSet, "model has no training series");
    if (query.points.empty()) fail(ErrorCode::EmptySeries, "query series is empty");
    Classification best{"", std::numeric_limits<double>::infinity()};
    bool have = false;
    for (const auto& t : model.training) {
        std::optional<std::size_t> band = model.distance.band;
        if (band) {
            std::size_t n = query.points.size(), m = t.series.points.size();
            band = std::max(*band, n > m ? n - m : m - n);
        }
        double d = dtw_distance(query, t.series, band);
        if (!have || d < best.distance || (d == best.distance && t.label < best.label)) {
            best = {t.label, d};
            have = true;
        }
    }
    return best;
}

std::vector<LabeledSeries> segment_labeled_trace(std::span<const RtlsSample> labeled) {
    std::vector<LabeledSeries> out;
    std::map<std::string, std::size_t> open;  // tracker -> index of its running segment in `out`
    for (const auto& s : labeled) {
        if (!s.locationLabel) {
            open.erase(s.trackerId);
            continue;
        }
        auto it = open.find(s.trackerId);
        if (it == open.end() || out[it->second].label != *s.locationLabel) {
            LabeledSeries seg;
            seg.label = *s.locationLabel;
            seg.series.ownerTag = s.trackerId;
            out.push_back(std::move(seg));
            open[s.trackerId] = out.size() - 1;
            it = open.find(s.trackerId);
        }
        out[it->second].series.points.push_back({s.timestampMs, {s.x, s.y, s.z}});
    }
    return out;
}

namespace {

double squared(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

bool point_less(const Point3& a, const Point3& b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
}

/// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::size_t> kmeans(const std::vector<Point3>& pts, std::size_t k, std::uint64_t seed,
                                std::vector<Point3>& centroids) {
    std::mt19937_64 rng(seed);
    const std::size_t n = pts.size();
    centroids.clear();
    centroids.push_back(pts[rng() % n]);
    std::vector<double> d2(n);
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, squared(pts[i], c));
            d2[i] = best;
            total += best;
        }
        if (total == 0.0) {
            centroids.push_back(pts[rng() % n]);
            continue;
        }
        double target = unit(rng) * total;
        std::size_t pick = n - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc > target) {
                pick = i;
                break;
            }
        }
        centroids.push_back(pts[pick]);
    }

    std::vector<std::size_t> assign(n, 0);
    for (int iter = 0; iter < 300; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = squared(pts[i], centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                double d = squared(pts[i], centroids[c]);
                if (d < best_d || (d == best_d && point_less(centroids[c], centroids[best]))) {
                    best_d = d;
                    best = c;
                }
            }
            assign[i] = best;
        }
        std::vector<Point3> sums(k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assign[i]].x += pts[i].x;
            sums[assign[i]].y += pts[i].y;
            sums[assign[i]].z += pts[i].z;
            ++counts[assign[i]];
        }
        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            Point3 next{sums[c].x / counts[c], sums[c].y / counts[c], sums[c].z / counts[c]};
            shift = std::max(shift, distance(next, centroids[c]));
            centroids[c] = next;
        }
        if (shift < 1e-9) break;
    }
    return assign;
}

constexpr std::size_t kNoise = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> dbscan(const std::vector<Point3>& pts, double eps, std::size_t min_pts) {
    const std::size_t n = pts.size();
    constexpr std::size_t unvisited = kNoise - 1;
    std::vector<std::size_t> label(n, unvisited);
    auto neighbours = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            if (distance(pts[i], pts[j]) <= eps) out.push_back(j);
        }
        return out;
    };
    std::size_t cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != unvisited) continue;
        auto nb = neighbours(i);
        if (nb.size() < min_pts) {
            label[i] = kNoise;
            continue;
        }
        label[i] = cluster;
        std::vector<std::size_t> frontier(nb.begin(), nb.end());
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            std::size_t j = frontier[f];
            if (label[j] == kNoise) label[j] = cluster;
            if (label[j] != unvisited) continue;
            label[j] = cluster;
            auto nb2 = neighbours(j);
            if (nb2.size() >= min_pts) frontier.insert(frontier.end(), nb2.begin(), nb2.end());
        }
        ++cluster;
    }
    return label;
}

}  // namespace

ClusterResult cluster_positions(const std::vector<PositionEstimate>& estimates, const ClusterMethod& method) {
    std::vector<const PositionEstimate*> known;
    ClusterResult out;
    for (const auto& e : estimates) {
        if (e.status == EstimateStatus::Known) {
            known.push_back(&e);
        } else {
            out.rejected.push_back(e.ownerTag);
        }
    }
    if (known.empty()) fail(ErrorCode::InsufficientData, "clustering needs at least one Known position");
    std::sort(known.begin(), known.end(), [](auto* a, auto* b) { return a->ownerTag < b->ownerTag; });
    std::vector<Point3> pts;
    for (auto* e : known) pts.push_back(e->mean);

    std::vector<std::size_t> raw;
    std::size_t clusters = 0;
    std::vector<Point3> centroids;
    if (const auto* km = std::get_if<KMeans>(&method)) {
        if (km->k == 0) fail(ErrorCode::InvalidArgument, "k-means needs k >= 1");
        clusters = std::min(km->k, pts.size());
        raw = kmeans(pts, clusters, km->seed, centroids);
    } else {
        const auto& db = std::get<Dbscan>(method);
        raw = dbscan(pts, db.eps, db.minPts);
        for (std::size_t r : raw) {
            if (r != kNoise) clusters = std::max(clusters, r + 1);
        }
        centroids.assign(clusters, Point3{});
        std::vector<std::size_t> counts(clusters, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (raw[i] == kNoise) continue;
            centroids[raw[i]].x += pts[i].x;
            centroids[raw[i]].y += pts[i].y;
            centroids[raw[i]].z += pts[i].z;
            ++counts[raw[i]];
        }
        for (std::size_t c = 0; c < clusters; ++c) {
            centroids[c] = {centroids[c].x / counts[c], centroids[c].y / counts[c], centroids[c].z / counts[c]};
        }
    }

    // Number the non-empty clusters by centroid position.
    std::vector<std::size_t> used;
    for (std::size_t c = 0; c < clusters; ++c) {
        if (std::find(raw.begin(), raw.end(), c) != raw.end()) used.push_back(c);
    }
    std::sort(used.begin(), used.end(), [&](std::size_t a, std::size_t b) {
        return point_less(centroids[a], centroids[b]) || (!point_less(centroids[b], centroids[a]) && a < b);
    });
    std::map<std::size_t, std::string> name;
    for (std::size_t i = 0; i < used.size(); ++i) {
        name[used[i]] = "C" + std::to_string(i + 1);
        out.centroids.push_back(centroids[used[i]]);
    }
    for (std::size_t i = 0; i < known.size(); ++i) {
        if (raw[i] == kNoise) {
            out.rejected.push_back(known[i]->ownerTag);
        } else {
            out.assignment[known[i]->ownerTag] = name[raw[i]];
        }
    }
    std::sort(out.rejected.begin(), out.rejected.end());
    return out;
}

}  // namespace dtwin::dynamics

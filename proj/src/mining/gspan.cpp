#include "dtwin/mining/gspan.hpp"

#include "dtwin/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace dtwin::mining {

std::string to_string(const DfsCode& code) {
    std::ostringstream os;
    for (std::size_t i = 0; i < code.size(); ++i) {
        const auto& e = code[i];
        if (i) os << ' ';
        os << '(' << e.from << ',' << e.to << ',' << e.fromLabel << ',' << e.edgeLabel << ',' << e.toLabel << ')';
    }
    return os.str();
}

DfsCode parse_code(std::string_view text) {
    DfsCode code;
    std::size_t i = 0;
    auto bad = [&]() { fail(ErrorCode::InvalidArgument, "malformed DFS code near offset " + std::to_string(i)); };
    while (i < text.size()) {
        if (text[i] == ' ') {
            ++i;
            continue;
        }
        if (text[i] != '(') bad();
        auto close = text.find(')', i);
        if (close == std::string_view::npos) bad();
        std::vector<std::string> parts;
        std::size_t start = i + 1;
        while (true) {
            auto comma = text.find(',', start);
            if (comma == std::string_view::npos || comma > close) comma = close;
            parts.emplace_back(text.substr(start, comma - start));
            if (comma == close) break;
            start = comma + 1;
        }
        if (parts.size() != 5) bad();
        CodeEdge e;
        try {
            e.from = std::stoi(parts[0]);
            e.to = std::stoi(parts[1]);
        } catch (const std::exception&) {
            bad();
        }
        e.fromLabel = parts[2];
        e.edgeLabel = parts[3];
        e.toLabel = parts[4];
        code.push_back(std::move(e));
        i = close + 1;
    }
    return code;
}

std::size_t vertex_count(const DfsCode& code) {
    int top = -1;
    for (const auto& e : code) top = std::max({top, e.from, e.to});
    return static_cast<std::size_t>(top + 1);
}

std::int64_t mni_support(const std::vector<std::vector<std::uint32_t>>& embeddings, std::size_t vertexCount) {
    if (embeddings.empty() || vertexCount == 0) return 0;
    std::int64_t best = -1;
    std::vector<std::uint32_t> images;
    for (std::size_t k = 0; k < vertexCount; ++k) {
        images.clear();
        for (const auto& emb : embeddings) images.push_back(emb[k]);
        std::sort(images.begin(), images.end());
        auto distinct = static_cast<std::int64_t>(std::unique(images.begin(), images.end()) - images.begin());
        best = best < 0 ? distinct : std::min(best, distinct);
    }
    return best;
}

namespace {

/// Flips every entry of a composite edge label to the other endpoint's view.
std::string flip_label(const std::string& label) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = label.find('|', start);
        std::string part = label.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        if (!part.empty()) part.back() = part.back() == '>' ? '<' : '>';
        parts.push_back(std::move(part));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "|" : "") + parts[i];
    return out;
}

struct IE {
    int from, to, fl, el, tl;
    bool operator==(const IE&) const = default;
    auto operator<=>(const IE&) const = default;
};
using ICode = std::vector<IE>;

struct Adj {
    int to;
    int el;
    int eid;
};

/// Undirected simple graph with oriented edge labels.
struct SGraph {
    std::vector<int> vl;
    std::vector<std::vector<Adj>> adj;  // sorted by `to`
    int edges = 0;
};

/// Lexicographic interning, so integer order equals string order.
struct Vocabulary {
    std::vector<std::string> vertex;
    std::vector<std::string> edge;
    std::vector<int> rev;

    int vid(const std::string& s) const {
        return static_cast<int>(std::lower_bound(vertex.begin(), vertex.end(), s) - vertex.begin());
    }
    int eid(const std::string& s) const {
        return static_cast<int>(std::lower_bound(edge.begin(), edge.end(), s) - edge.begin());
    }

    void finish(std::set<std::string> vlabels, std::set<std::string> elabels) {
        std::set<std::string> all = elabels;
        for (const auto& e : elabels) all.insert(flip_label(e));
        vertex.assign(vlabels.begin(), vlabels.end());
        edge.assign(all.begin(), all.end());
        rev.resize(edge.size());
        for (std::size_t i = 0; i < edge.size(); ++i) rev[i] = eid(flip_label(edge[i]));
    }
};

std::vector<int> rightmost_path(const ICode& code) {
    // Pattern vertices from the rightmost vertex back to the first vertex.
    std::vector<int> path;
    int maxtoc = 0;
    for (const auto& e : code) maxtoc = std::max({maxtoc, e.from, e.to});
    path.push_back(maxtoc);
    int cur = maxtoc;
    for (auto it = code.rbegin(); it != code.rend() && cur != 0; ++it) {
        if (it->from < it->to && it->to == cur) {
            cur = it->from;
            path.push_back(cur);
        }
    }
    return path;
}

int code_vertices(const ICode& code) {
    int top = -1;
    for (const auto& e : code) top = std::max({top, e.from, e.to});
    return top + 1;
}

SGraph pattern_graph(const ICode& code, const Vocabulary& voc) {
    SGraph g;
    int n = code_vertices(code);
    g.vl.assign(n, 0);
    g.adj.resize(n);
    for (std::size_t i = 0; i < code.size(); ++i) {
        const auto& e = code[i];
        g.vl[e.from] = e.fl;
        g.vl[e.to] = e.tl;
        g.adj[e.from].push_back({e.to, e.el, static_cast<int>(i)});
        g.adj[e.to].push_back({e.from, voc.rev[e.el], static_cast<int>(i)});
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end(), [](const Adj& x, const Adj& y) { return x.to < y.to; });
    g.edges = static_cast<int>(code.size());
    return g;
}

/// Greedy construction of the minimum DFS code. With `target`, stops at the
/// first entry that differs and reports whether `target` is minimal.
bool min_code(const SGraph& g, const ICode* target, ICode* out) {
    struct Emb {
        std::vector<int> vmap;  // code vertex -> graph vertex
        std::vector<char> used;
    };
    ICode cur;
    std::optional<IE> first;
    for (int a = 0; a < static_cast<int>(g.adj.size()); ++a) {
        for (const auto& e : g.adj[a]) {
            IE c{0, 1, g.vl[a], e.el, g.vl[e.to]};
            if (!first || c < *first) first = c;
        }
    }
    if (!first) {
        if (out) out->clear();
        return !target || target->empty();
    }
    if (target && (target->empty() || (*target)[0] != *first)) return false;
    std::vector<Emb> embs;
    for (int a = 0; a < static_cast<int>(g.adj.size()); ++a) {
        for (const auto& e : g.adj[a]) {
            if (IE{0, 1, g.vl[a], e.el, g.vl[e.to]} != *first) continue;
            Emb m{{a, e.to}, std::vector<char>(g.edges, 0)};
            m.used[e.eid] = 1;
            embs.push_back(std::move(m));
        }
    }
    cur.push_back(*first);

    while (true) {
        if (target && cur.size() == target->size()) return true;
        auto rmpath = rightmost_path(cur);
        const int rmost = rmpath.front();
        const int maxtoc = code_vertices(cur) - 1;
        std::optional<IE> next;
        std::vector<Emb> next_embs;

        // Backward edges from the rightmost vertex, nearest the root first.
        for (auto it = rmpath.rbegin(); it != rmpath.rend() && !next; ++it) {
            int u = *it;
            if (u == rmost) continue;
            int best = -1;
            for (const auto& m : embs) {
                for (const auto& e : g.adj[m.vmap[rmost]]) {
                    if (e.to == m.vmap[u] && !m.used[e.eid] && (best < 0 || e.el < best)) best = e.el;
                }
            }
            if (best < 0) continue;
            next = IE{rmost, u, g.vl[embs.front().vmap[rmost]], best, g.vl[embs.front().vmap[u]]};
            for (auto& m : embs) {
                for (const auto& e : g.adj[m.vmap[rmost]]) {
                    if (e.to == m.vmap[u] && !m.used[e.eid] && e.el == best) {
                        Emb n = m;
                        n.used[e.eid] = 1;
                        next_embs.push_back(std::move(n));
                    }
                }
            }
        }

        // Forward edges: rightmost vertex first, then up the rightmost path.
        for (std::size_t k = 0; k < rmpath.size() && !next; ++k) {
            int u = rmpath[k];
            std::optional<std::pair<int, int>> best;
            for (const auto& m : embs) {
                for (const auto& e : g.adj[m.vmap[u]]) {
                    if (std::find(m.vmap.begin(), m.vmap.end(), e.to) != m.vmap.end()) continue;
                    std::pair<int, int> key{e.el, g.vl[e.to]};
                    if (!best || key < *best) best = key;
                }
            }
            if (!best) continue;
            next = IE{u, maxtoc + 1, g.vl[embs.front().vmap[u]], best->first, best->second};
            for (const auto& m : embs) {
                for (const auto& e : g.adj[m.vmap[u]]) {
                    if (std::find(m.vmap.begin(), m.vmap.end(), e.to) != m.vmap.end()) continue;
                    if (e.el != best->first || g.vl[e.to] != best->second) continue;
                    Emb n = m;
                    n.vmap.push_back(e.to);
                    n.used[e.eid] = 1;
                    next_embs.push_back(std::move(n));
                }
            }
        }

        if (!next) {
            if (out) *out = cur;
            return !target || cur.size() == target->size();
        }
        if (target && (*target)[cur.size()] != *next) return false;
        cur.push_back(*next);
        embs = std::move(next_embs);
    }
}

bool is_min(const ICode& code, const Vocabulary& voc) {
    return min_code(pattern_graph(code, voc), &code, nullptr);
}

struct PDFS {
    int from;
    int to;
    int eid;
    const PDFS* prev;
};
using Projected = std::vector<PDFS>;

class Miner {
public:
    Miner(const MiningGraph& mg, const MiningParams& params) : mg_(mg), params_(params) { build(); }

    std::vector<Pattern> run() {
        std::map<IE, Projected> roots;
        for (int a = 0; a < static_cast<int>(g_.adj.size()); ++a) {
            for (const auto& e : g_.adj[a]) roots[IE{0, 1, g_.vl[a], e.el, g_.vl[e.to]}].push_back({a, e.to, e.eid, nullptr});
        }
        ICode code;
        for (auto& [edge, proj] : roots) {
            std::vector<std::vector<std::uint32_t>> tmp;
            for (const auto& p : proj) tmp.push_back({static_cast<std::uint32_t>(p.from), static_cast<std::uint32_t>(p.to)});
            auto support = mni_support(tmp, 2);
            if (support < params_.minSupport) continue;
            code.push_back(edge);
            if (is_min(code, voc_)) grow(code, proj, support);
            code.pop_back();
        }
        return std::move(out_);
    }

private:
    void build() {
        std::set<std::string> vlabels, elabels;
        for (const auto& v : mg_.vertices) vlabels.insert(v.label);
        std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>> pairs;
        for (const auto& e : mg_.edges) {
            if (e.src == e.dst) continue;
            if (e.src < e.dst) {
                pairs[{e.src, e.dst}].push_back(e.label + ">");
            } else {
                pairs[{e.dst, e.src}].push_back(e.label + "<");
            }
        }
        std::vector<std::tuple<std::size_t, std::size_t, std::string>> simple;
        for (auto& [key, parts] : pairs) {
            std::sort(parts.begin(), parts.end());
            parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
            std::string label;
            for (std::size_t i = 0; i < parts.size(); ++i) label += (i ? "|" : "") + parts[i];
            elabels.insert(label);
            simple.emplace_back(key.first, key.second, std::move(label));
        }
        voc_.finish(std::move(vlabels), std::move(elabels));
        g_.vl.resize(mg_.vertices.size());
        g_.adj.resize(mg_.vertices.size());
        for (std::size_t i = 0; i < mg_.vertices.size(); ++i) g_.vl[i] = voc_.vid(mg_.vertices[i].label);
        for (const auto& [a, b, label] : simple) {
            int el = voc_.eid(label);
            g_.adj[a].push_back({static_cast<int>(b), el, g_.edges});
            g_.adj[b].push_back({static_cast<int>(a), voc_.rev[el], g_.edges});
            ++g_.edges;
        }
        for (auto& a : g_.adj) std::sort(a.begin(), a.end(), [](const Adj& x, const Adj& y) { return x.to < y.to; });
    }

    struct Child {
        Projected proj;
        std::vector<std::uint32_t> parent;  // embedding index in the parent projection
        std::vector<int> added;             // new vertex image, -1 for backward edges
    };

    void grow(ICode& code, const Projected& proj, std::int64_t support) {
        const int nv = code_vertices(code);
        const int ne = static_cast<int>(code.size());
        const std::size_t n = proj.size();

        std::vector<int> vmaps(n * nv);
        std::vector<int> used(n * ne);
        for (std::size_t k = 0; k < n; ++k) {
            int* vm = &vmaps[k * nv];
            int* us = &used[k * ne];
            int idx = ne - 1;
            for (const PDFS* p = &proj[k]; p; p = p->prev, --idx) {
                vm[code[idx].from] = p->from;
                vm[code[idx].to] = p->to;
                us[idx] = p->eid;
            }
        }

        if (static_cast<std::size_t>(nv) >= params_.minNodes) report(code, vmaps, used, n, nv, ne, support);

        auto rmpath = rightmost_path(code);
        const int rmost = rmpath.front();
        const bool can_add_vertex = static_cast<std::size_t>(nv) < params_.maxNodes;
        std::map<IE, Child> children;
        for (std::size_t k = 0; k < n; ++k) {
            const int* vm = &vmaps[k * nv];
            const int* us = &used[k * ne];
            auto is_used = [&](int eid) { return std::find(us, us + ne, eid) != us + ne; };
            auto mapped = [&](int v) { return std::find(vm, vm + nv, v) != vm + nv; };
            const int r = vm[rmost];
            for (std::size_t i = 1; i < rmpath.size(); ++i) {
                int u = rmpath[i];
                for (const auto& e : g_.adj[r]) {
                    if (e.to != vm[u] || is_used(e.eid)) continue;
                    auto& c = children[IE{rmost, u, g_.vl[r], e.el, g_.vl[e.to]}];
                    c.proj.push_back({r, e.to, e.eid, &proj[k]});
                    c.parent.push_back(static_cast<std::uint32_t>(k));
                    c.added.push_back(-1);
                }
            }
            if (!can_add_vertex) continue;
            for (int u : rmpath) {
                const int gu = vm[u];
                for (const auto& e : g_.adj[gu]) {
                    if (mapped(e.to)) continue;
                    auto& c = children[IE{u, nv, g_.vl[gu], e.el, g_.vl[e.to]}];
                    c.proj.push_back({gu, e.to, e.eid, &proj[k]});
                    c.parent.push_back(static_cast<std::uint32_t>(k));
                    c.added.push_back(e.to);
                }
            }
        }

        for (auto& [edge, child] : children) {
            auto s = child_support(child, vmaps, nv);
            if (s < params_.minSupport) continue;
            code.push_back(edge);
            if (is_min(code, voc_)) grow(code, child.proj, s);
            code.pop_back();
        }
    }

    std::int64_t child_support(const Child& c, const std::vector<int>& vmaps, int nv) const {
        std::int64_t best = -1;
        std::vector<int> images;
        for (int k = 0; k <= nv; ++k) {
            images.clear();
            for (std::size_t i = 0; i < c.parent.size(); ++i) {
                if (k < nv) {
                    images.push_back(vmaps[c.parent[i] * nv + k]);
                } else if (c.added[i] >= 0) {
                    images.push_back(c.added[i]);
                }
            }
            if (k == nv && c.added.front() < 0) break;
            std::sort(images.begin(), images.end());
            auto d = static_cast<std::int64_t>(std::unique(images.begin(), images.end()) - images.begin());
            best = best < 0 ? d : std::min(best, d);
        }
        return best;
    }

    /// A pattern is maximal when no one-edge extension, anywhere in the
    /// pattern and within the size bound, keeps its support.
    bool maximal(const std::vector<int>& vmaps, const std::vector<int>& used, std::size_t n, int nv, int ne,
                 std::int64_t support) const {
        const bool can_add_vertex = static_cast<std::size_t>(nv) < params_.maxNodes;
        std::map<std::tuple<int, int, int, int>, Child> ext;  // (u, w or -1, el, tolabel)
        for (std::size_t k = 0; k < n; ++k) {
            const int* vm = &vmaps[k * nv];
            const int* us = &used[k * ne];
            for (int u = 0; u < nv; ++u) {
                for (const auto& e : g_.adj[vm[u]]) {
                    if (std::find(us, us + ne, e.eid) != us + ne) continue;
                    const int* w = std::find(vm, vm + nv, e.to);
                    if (w != vm + nv) {
                        int wi = static_cast<int>(w - vm);
                        if (wi < u) continue;
                        auto& c = ext[{u, wi, e.el, -1}];
                        c.parent.push_back(static_cast<std::uint32_t>(k));
                        c.added.push_back(-1);
                    } else if (can_add_vertex) {
                        auto& c = ext[{u, -1, e.el, g_.vl[e.to]}];
                        c.parent.push_back(static_cast<std::uint32_t>(k));
                        c.added.push_back(e.to);
                    }
                }
            }
        }
        for (const auto& [key, c] : ext) {
            if (child_support(c, vmaps, nv) == support) return false;
        }
        return true;
    }

    bool rooted(const ICode& code, int nv) const {
        std::vector<std::vector<int>> down(nv);
        const std::string contains_out = "Contains>";
        for (const auto& e : code) {
            const std::string& label = voc_.edge[e.el];
            const std::string& back = voc_.edge[voc_.rev[e.el]];
            auto has = [&](const std::string& l) {
                std::size_t start = 0;
                while (true) {
                    auto pos = l.find('|', start);
                    if (l.compare(start, pos == std::string::npos ? std::string::npos : pos - start, contains_out) == 0)
                        return true;
                    if (pos == std::string::npos) return false;
                    start = pos + 1;
                }
            };
            if (has(label)) down[e.from].push_back(e.to);
            if (has(back)) down[e.to].push_back(e.from);
        }
        for (int r = 0; r < nv; ++r) {
            std::vector<char> seen(nv, 0);
            std::vector<int> stack{r};
            seen[r] = 1;
            int count = 1;
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w : down[v]) {
                    if (!seen[w]) {
                        seen[w] = 1;
                        ++count;
                        stack.push_back(w);
                    }
                }
            }
            if (count == nv) return true;
        }
        return false;
    }

    void report(const ICode& code, const std::vector<int>& vmaps, const std::vector<int>& used, std::size_t n, int nv,
                int ne, std::int64_t support) {
        if (params_.rootedOnly && !rooted(code, nv)) return;
        Pattern p;
        for (const auto& e : code) {
            p.code.push_back({e.from, e.to, voc_.vertex[e.fl], voc_.edge[e.el], voc_.vertex[e.tl]});
        }
        p.support = support;
        p.embeddings.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            p.embeddings[k].assign(vmaps.begin() + k * nv, vmaps.begin() + (k + 1) * nv);
        }
        std::sort(p.embeddings.begin(), p.embeddings.end());
        p.maximal = maximal(vmaps, used, n, nv, ne, support);
        out_.push_back(std::move(p));
    }

    const MiningGraph& mg_;
    MiningParams params_;
    Vocabulary voc_;
    SGraph g_;
    std::vector<Pattern> out_;
};

/// Interns the labels of public codes so that they can use the integer machinery.
Vocabulary vocabulary_of(std::initializer_list<const DfsCode*> codes) {
    std::set<std::string> v, e;
    for (const auto* c : codes) {
        for (const auto& x : *c) {
            v.insert(x.fromLabel);
            v.insert(x.toLabel);
            e.insert(x.edgeLabel);
        }
    }
    Vocabulary voc;
    voc.finish(std::move(v), std::move(e));
    return voc;
}

ICode to_icode(const DfsCode& code, const Vocabulary& voc) {
    ICode out;
    for (const auto& e : code) out.push_back({e.from, e.to, voc.vid(e.fromLabel), voc.eid(e.edgeLabel), voc.vid(e.toLabel)});
    return out;
}

}  // namespace

std::vector<Pattern> mine(const MiningGraph& g, const MiningParams& params) {
    if (params.minSupport < 2) fail(ErrorCode::InvalidArgument, "minSupport must be at least 2");
    if (params.minNodes < 2 || params.minNodes > params.maxNodes) {
        fail(ErrorCode::InvalidArgument, "node bounds must satisfy 2 <= minNodes <= maxNodes");
    }
    for (const auto& e : g.edges) {
        if (e.src >= g.vertices.size() || e.dst >= g.vertices.size()) {
            fail(ErrorCode::InvalidArgument, "mining edge refers to a missing vertex");
        }
    }
    auto out = Miner(g, params).run();
    std::sort(out.begin(), out.end(), [](const Pattern& a, const Pattern& b) {
        auto ka = std::make_tuple(-a.support, -static_cast<long>(a.vertex_count()), -static_cast<long>(a.edge_count()));
        auto kb = std::make_tuple(-b.support, -static_cast<long>(b.vertex_count()), -static_cast<long>(b.edge_count()));
        if (ka != kb) return ka < kb;
        return a.code < b.code;
    });
    return out;
}

DfsCode canonical_code(const DfsCode& code) {
    auto voc = vocabulary_of({&code});
    ICode min;
    min_code(pattern_graph(to_icode(code, voc), voc), nullptr, &min);
    DfsCode out;
    for (const auto& e : min) out.push_back({e.from, e.to, voc.vertex[e.fl], voc.edge[e.el], voc.vertex[e.tl]});
    return out;
}

DfsCode graph_code(const MiningGraph& g) {
    if (g.vertices.empty()) return {};
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::string>> pairs;
    for (const auto& e : g.edges) {
        if (e.src == e.dst) continue;
        if (e.src < e.dst) {
            pairs[{e.src, e.dst}].push_back(e.label + ">");
        } else {
            pairs[{e.dst, e.src}].push_back(e.label + "<");
        }
    }
    DfsCode code;
    std::vector<bool> touched(g.vertices.size(), false);
    for (auto& [key, parts] : pairs) {
        std::sort(parts.begin(), parts.end());
        parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
        std::string label;
        for (std::size_t i = 0; i < parts.size(); ++i) label += (i ? "|" : "") + parts[i];
        code.push_back({static_cast<int>(key.first), static_cast<int>(key.second), g.vertices[key.first].label, label,
                        g.vertices[key.second].label});
        touched[key.first] = touched[key.second] = true;
    }
    if (std::find(touched.begin(), touched.end(), false) != touched.end()) {
        fail(ErrorCode::InvalidArgument, "pattern graph has isolated vertices");
    }
    auto canon = canonical_code(code);
    if (vertex_count(canon) != g.vertices.size()) fail(ErrorCode::InvalidArgument, "pattern graph is not connected");
    return canon;
}

bool isomorphic(const DfsCode& a, const DfsCode& b) {
    if (a.size() != b.size() || vertex_count(a) != vertex_count(b)) return false;
    return canonical_code(a) == canonical_code(b);
}

bool sub_isomorphic(const DfsCode& small, const DfsCode& big) {
    const int ns = static_cast<int>(vertex_count(small));
    const int nb = static_cast<int>(vertex_count(big));
    if (ns > nb || small.size() > big.size()) return false;
    std::vector<std::string> sl(ns), bl(nb);
    std::vector<std::map<int, std::string>> badj(nb);
    std::vector<std::vector<std::pair<int, std::string>>> sadj(ns);  // oriented from the key vertex
    for (const auto& e : small) {
        sl[e.from] = e.fromLabel;
        sl[e.to] = e.toLabel;
        sadj[e.from].push_back({e.to, e.edgeLabel});
        sadj[e.to].push_back({e.from, flip_label(e.edgeLabel)});
    }
    for (const auto& e : big) {
        bl[e.from] = e.fromLabel;
        bl[e.to] = e.toLabel;
        badj[e.from][e.to] = e.edgeLabel;
        badj[e.to][e.from] = flip_label(e.edgeLabel);
    }
    if (ns == 0) return true;
    // Label multiset containment as a cheap filter.
    {
        std::multiset<std::string> have(bl.begin(), bl.end());
        for (const auto& l : sl) {
            auto it = have.find(l);
            if (it == have.end()) return false;
            have.erase(it);
        }
    }
    std::vector<int> order{0};
    std::vector<char> queued(ns, 0);
    queued[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& [w, l] : sadj[order[i]]) {
            if (!queued[w]) {
                queued[w] = 1;
                order.push_back(w);
            }
        }
    }
    if (static_cast<int>(order.size()) != ns) return false;  // disconnected pattern
    std::vector<int> f(ns, -1);
    std::vector<char> taken(nb, 0);
    std::function<bool(std::size_t)> place = [&](std::size_t i) -> bool {
        if (i == order.size()) return true;
        int v = order[i];
        for (int w = 0; w < nb; ++w) {
            if (taken[w] || bl[w] != sl[v]) continue;
            bool ok = true;
            for (const auto& [x, l] : sadj[v]) {
                if (f[x] < 0) continue;
                auto it = badj[w].find(f[x]);
                if (it == badj[w].end() || it->second != l) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            f[v] = w;
            taken[w] = 1;
            if (place(i + 1)) return true;
            f[v] = -1;
            taken[w] = 0;
        }
        return false;
    };
    return place(0);
}

}  // namespace dtwin::mining

#include "imcop/json_model.hpp"

#include <fstream>

namespace imcop {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path.empty() ? "/" : path, what);
}

const Json& field(const Json& j, const char* name, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(name);
    if (it == j.end()) fail(path + "/" + name, "missing field");
    return *it;
}

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

Vector vec(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v[Index(i)] = number(j[i], path + "/" + std::to_string(i));
    return v;
}

// scalar p broadcast to d entries, or an explicit d-vector
Vector prob_vector(const Json& j, int d, const std::string& path) {
    if (j.is_number()) return Vector::Constant(d, j.get<double>());
    Vector v = vec(j, path);
    if (int(v.size()) != d) fail(path, "expected " + std::to_string(d) + " entries");
    return v;
}

std::string text(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

// subset keys like "1,2,4" -> bitmask
std::uint32_t parse_subset_key(const std::string& key, int d, const std::string& path) {
    std::uint32_t mask = 0;
    size_t pos = 0;
    while (pos < key.size()) {
        size_t next = key.find(',', pos);
        if (next == std::string::npos) next = key.size();
        int idx = 0;
        try {
            idx = std::stoi(key.substr(pos, next - pos));
        } catch (...) {
            fail(path, "bad subset key '" + key + "'");
        }
        if (idx < 1 || idx > d) fail(path, "subset index outside 1..d in '" + key + "'");
        mask |= std::uint32_t(1) << (idx - 1);
        pos = next + 1;
    }
    return mask;
}

template <typename Fn>
auto rethrow(const std::string& path, Fn fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

EfgmParameters parse_efgm_params(const Json& j, const std::string& path) {
    EfgmParameters p;
    if (j.contains("d"))
        p.d = integer(field(j, "d", path), path + "/d");
    else
        p.d = integer(field(j, "dim", path), path + "/dim");
    const Json& th = field(j, "thetas", path);
    if (!th.is_object()) fail(path + "/thetas", "expected an object keyed by subsets");
    for (auto it = th.begin(); it != th.end(); ++it) {
        std::uint32_t mask = parse_subset_key(it.key(), p.d, path + "/thetas");
        p.thetas[mask] = number(it.value(), path + "/thetas/" + it.key());
    }
    return p;
}

}  // namespace

EfgmParameters parse_efgm_parameters(const Json& j, const std::string& path) {
    // accept both the bare parameter object and the {"efgm": {...}} wrapper
    if (j.is_object() && j.size() == 1 && j.contains("efgm"))
        return parse_efgm_params(j["efgm"], path + "/efgm");
    return parse_efgm_params(j, path);
}

BernoulliVectorLaw parse_bernoulli_law(const Json& j, const std::string& path) {
    std::string kind = text(field(j, "kind", path), path + "/kind");
    return rethrow(path, [&]() -> BernoulliVectorLaw {
        if (kind == "table") {
            int d = integer(field(j, "d", path), path + "/d");
            const Json& entries = field(j, "entries", path);
            if (!entries.is_array()) fail(path + "/entries", "expected an array");
            std::vector<std::uint32_t> bits;
            std::vector<double> probs;
            for (size_t i = 0; i < entries.size(); ++i) {
                std::string epath = path + "/entries/" + std::to_string(i);
                const Json& b = field(entries[i], "b", epath);
                if (!b.is_array() || int(b.size()) != d) fail(epath + "/b", "expected d bits");
                std::uint32_t mask = 0;
                for (int k = 0; k < d; ++k) {
                    int bit = integer(b[size_t(k)], epath + "/b");
                    if (bit != 0 && bit != 1) fail(epath + "/b", "bits must be 0 or 1");
                    if (bit) mask |= std::uint32_t(1) << k;
                }
                bits.push_back(mask);
                probs.push_back(number(field(entries[i], "p", epath), epath + "/p"));
            }
            return BernoulliVectorLaw(d, std::move(bits),
                                      Eigen::Map<Vector>(probs.data(), Index(probs.size())));
        }
        if (kind == "independent") {
            int d = integer(field(j, "d", path), path + "/d");
            Vector p = prob_vector(field(j, "p", path), d, path + "/p");
            return BernoulliVectorLaw::independent(d, p);
        }
        if (kind == "comonotone") {
            int d = integer(field(j, "d", path), path + "/d");
            double p = number(field(j, "p", path), path + "/p");
            return BernoulliVectorLaw::comonotone(d, p);
        }
        if (kind == "copula") {
            CopulaPtr c0 = parse_copula(field(j, "copula", path), path + "/copula");
            Vector p = prob_vector(field(j, "p", path), c0->dim(), path + "/p");
            return BernoulliVectorLaw::from_copula(*c0, p);
        }
        fail(path + "/kind", "unknown Bernoulli law kind '" + kind + "'");
    });
}

IndexDistribution parse_index_distribution(const Json& j, const std::string& path) {
    std::string kind = text(field(j, "kind", path), path + "/kind");
    return rethrow(path, [&]() -> IndexDistribution {
        if (kind == "table") {
            int d = integer(field(j, "d", path), path + "/d");
            int K = integer(field(j, "K", path), path + "/K");
            const Json& entries = field(j, "entries", path);
            if (!entries.is_array() || entries.empty())
                fail(path + "/entries", "expected a non-empty array");
            std::vector<std::vector<int>> vectors;
            std::vector<double> probs;
            for (size_t i = 0; i < entries.size(); ++i) {
                std::string epath = path + "/entries/" + std::to_string(i);
                const Json& iv = field(entries[i], "i", epath);
                if (!iv.is_array() || int(iv.size()) != d)
                    fail(epath + "/i", "expected a d-tuple");
                std::vector<int> v(static_cast<size_t>(d), 0);
                for (int k = 0; k < d; ++k) v[size_t(k)] = integer(iv[size_t(k)], epath + "/i");
                vectors.push_back(std::move(v));
                probs.push_back(number(field(entries[i], "p", epath), epath + "/p"));
            }
            return IndexDistribution::from_table(
                d, K, std::move(vectors), Eigen::Map<Vector>(probs.data(), Index(probs.size())));
        }
        if (kind == "comonotone") {
            int d = integer(field(j, "d", path), path + "/d");
            Vector p = vec(field(j, "p", path), path + "/p");
            return IndexDistribution::comonotone_law(d, p);
        }
        if (kind == "bernoulli_copula") {
            std::vector<std::pair<CopulaPtr, Vector>> terms;
            if (j.contains("terms")) {
                const Json& arr = field(j, "terms", path);
                if (!arr.is_array() || arr.empty())
                    fail(path + "/terms", "expected a non-empty array");
                for (size_t i = 0; i < arr.size(); ++i) {
                    std::string tpath = path + "/terms/" + std::to_string(i);
                    CopulaPtr c0 = parse_copula(field(arr[i], "copula", tpath), tpath + "/copula");
                    Vector p =
                        prob_vector(field(arr[i], "p", tpath), c0->dim(), tpath + "/p");
                    terms.emplace_back(std::move(c0), std::move(p));
                }
            } else {
                CopulaPtr c0 = parse_copula(field(j, "copula", path), path + "/copula");
                Vector p = prob_vector(field(j, "p", path), c0->dim(), path + "/p");
                terms.emplace_back(std::move(c0), std::move(p));
            }
            return IndexDistribution::bernoulli_copula(terms);
        }
        if (kind == "multinomial_shift") {
            int K = integer(field(j, "K", path), path + "/K");
            Vector q = vec(field(j, "q", path), path + "/q");
            return IndexDistribution::multinomial_shift(K, q);
        }
        if (kind == "copula_quantile") {
            CopulaPtr c0 = parse_copula(field(j, "copula", path), path + "/copula");
            const Json& pm = field(j, "pmfs", path);
            if (!pm.is_array() || int(pm.size()) != c0->dim())
                fail(path + "/pmfs", "expected one pmf per coordinate");
            std::vector<Vector> pmfs;
            for (size_t i = 0; i < pm.size(); ++i)
                pmfs.push_back(vec(pm[i], path + "/pmfs/" + std::to_string(i)));
            return IndexDistribution::copula_quantile(*c0, pmfs);
        }
        fail(path + "/kind", "unknown index distribution kind '" + kind + "'");
    });
}

CopulaPtr parse_copula(const Json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a copula descriptor object");
    // single-key wrapper forms {"efgm": {...}}, {"efgm_bernoulli": {...}}
    if (!j.contains("kind") && j.size() == 1) {
        const std::string key = j.begin().key();
        if (key == "efgm")
            return rethrow(path, [&]() -> CopulaPtr {
                return efgm(parse_efgm_params(j["efgm"], path + "/efgm"));
            });
        if (key == "efgm_bernoulli")
            return rethrow(path, [&]() -> CopulaPtr {
                return efgm_from_bernoulli(
                    parse_bernoulli_law(j["efgm_bernoulli"], path + "/efgm_bernoulli"));
            });
    }
    std::string kind = text(field(j, "kind", path), path + "/kind");
    return rethrow(path, [&]() -> CopulaPtr {
        if (kind == "independence")
            return independence(integer(field(j, "dim", path), path + "/dim"));
        if (kind == "comonotone")
            return comonotone(integer(field(j, "dim", path), path + "/dim"));
        if (kind == "countermonotone") return countermonotone();
        if (kind == "clayton")
            return clayton(number(field(j, "theta", path), path + "/theta"),
                           integer(field(j, "dim", path), path + "/dim"));
        if (kind == "gumbel")
            return gumbel(number(field(j, "theta", path), path + "/theta"),
                          integer(field(j, "dim", path), path + "/dim"));
        if (kind == "efgm") return efgm(parse_efgm_params(j, path));
        if (kind == "efgm_bernoulli")
            return efgm_from_bernoulli(parse_bernoulli_law(field(j, "law", path), path + "/law"));
        if (kind == "gaussian") {
            const Json& rho = field(j, "rho", path);
            if (!rho.is_array() || rho.empty()) fail(path + "/rho", "expected a matrix");
            const size_t d = rho.size();
            Matrix corr(d, d);
            for (size_t r = 0; r < d; ++r) {
                Vector rowv = vec(rho[r], path + "/rho/" + std::to_string(r));
                if (size_t(rowv.size()) != d) fail(path + "/rho", "matrix must be square");
                corr.row(Index(r)) = rowv;
            }
            return gaussian_sample_only(corr);
        }
        if (kind == "mixture") {
            Vector w = vec(field(j, "weights", path), path + "/weights");
            const Json& comps = field(j, "components", path);
            if (!comps.is_array() || int(comps.size()) != int(w.size()))
                fail(path + "/components", "components must match weights");
            std::vector<CopulaPtr> components;
            for (size_t i = 0; i < comps.size(); ++i)
                components.push_back(
                    parse_copula(comps[i], path + "/components/" + std::to_string(i)));
            return finite_mixture(std::vector<double>(w.data(), w.data() + w.size()),
                                  std::move(components));
        }
        if (kind == "survival")
            return parse_copula(field(j, "of", path), path + "/of")->survival();
        if (kind == "index_mixed") {
            const Json& basesj = field(j, "bases", path);
            if (!basesj.is_array() || basesj.empty())
                fail(path + "/bases", "expected a non-empty array");
            std::vector<CopulaPtr> bases;
            for (size_t i = 0; i < basesj.size(); ++i)
                bases.push_back(parse_copula(basesj[i], path + "/bases/" + std::to_string(i)));
            IndexDistribution idx =
                parse_index_distribution(field(j, "index", path), path + "/index");
            return make_index_mixed(std::move(bases), std::move(idx));
        }
        fail(path + "/kind", "unknown copula kind '" + kind + "'");
    });
}

std::vector<Margin> parse_margins(const Json& j, int d, const std::string& path) {
    auto one = [&](const Json& mj, const std::string& mpath) -> Margin {
        if (!mj.is_object()) fail(mpath, "expected a margin object");
        if (mj.contains("exp")) return ExponentialMargin{number(mj["exp"], mpath + "/exp")};
        if (mj.contains("point_mass"))
            return PointMassMargin{number(mj["point_mass"], mpath + "/point_mass")};
        fail(mpath, "unknown margin; use {\"exp\": rate} or {\"point_mass\": c}");
    };
    std::vector<Margin> out;
    if (j.is_array()) {
        if (int(j.size()) != d) fail(path, "expected one margin per coordinate");
        for (size_t i = 0; i < j.size(); ++i)
            out.push_back(one(j[i], path + "/" + std::to_string(i)));
    } else {
        Margin m = one(j, path);
        out.assign(size_t(d), m);
    }
    for (size_t i = 0; i < out.size(); ++i)
        if (const auto* e = std::get_if<ExponentialMargin>(&out[i]); e && !(e->rate > 0.0))
            fail(path, "exponential rate must be positive");
    return out;
}

JointModel parse_joint_model(const Json& j, const std::string& path) {
    CopulaPtr c = parse_copula(field(j, "copula", path), path + "/copula");
    JointModel jm;
    jm.copula = as_index_mixed(std::move(c));
    jm.margins = parse_margins(field(j, "margins", path), jm.copula->dim(), path + "/margins");
    return jm;
}

CopulaPtr parse_model_config(const Json& j, const std::string& path) {
    if (j.is_object() && j.contains("model")) return parse_copula(j["model"], path + "/model");
    return parse_copula(j, path);
}

Json load_json_file(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("/", "cannot open config file '" + file + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    return j;
}

}  // namespace imcop

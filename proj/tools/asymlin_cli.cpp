// Command line front end: evaluate norms and distances from instance files,
// compute operator/bilinear norms and adjoints, decide precompactness, build
// covering nets, and run the verification suites.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "asymlin/asymlin.hpp"

namespace {

using namespace asymlin;

struct GlobalFlags {
    std::uint64_t seed = 0;
    int dim_cap = 6;
    int generator_cap = 32;
    std::string eps = "1/2";
    std::string format = "text";
    std::string instance_path;
};

Caps caps_of(const GlobalFlags& g) {
    Caps c;
    c.dim_cap = g.dim_cap;
    c.generator_cap = g.generator_cap;
    return c;
}

Rational eps_of(const GlobalFlags& g) {
    auto q = parse_rational(g.eps);
    if (!q || *q <= 0) throw input_error("--eps must be a positive rational");
    return *q;
}

InstanceFile load_instance(const GlobalFlags& g) {
    if (g.instance_path.empty()) throw input_error("an instance file is required (-i FILE)");
    std::ifstream in(g.instance_path);
    if (!in) throw input_error("cannot open instance file '" + g.instance_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str(), caps_of(g));
}

const AsymNorm& space_of(const InstanceFile& f, const std::string& name) {
    auto it = f.spaces.find(name);
    if (it == f.spaces.end()) throw input_error("unknown space '" + name + "'");
    return it->second;
}

LinearOp op_of(const InstanceFile& f, const std::string& name) {
    auto it = f.ops.find(name);
    if (it == f.ops.end()) throw input_error("unknown op '" + name + "'");
    return make_linear_op(it->second.matrix, space_of(f, it->second.source),
                          space_of(f, it->second.target));
}

BilinearOp tensor_of(const InstanceFile& f, const std::string& name) {
    auto it = f.tensors.find(name);
    if (it == f.tensors.end()) throw input_error("unknown tensor '" + name + "'");
    return make_bilinear_op(it->second.tensor, space_of(f, it->second.source1),
                            space_of(f, it->second.source2), space_of(f, it->second.target));
}

QVec vec_arg(const std::string& raw, int dim) {
    QVec v;
    std::string cur;
    for (std::size_t i = 0; i <= raw.size(); ++i) {
        if (i == raw.size() || raw[i] == ',') {
            auto q = parse_rational(cur);
            if (!q) throw input_error("bad rational '" + cur + "' in vector argument");
            v.push_back(*q);
            cur.clear();
        } else {
            cur += raw[i];
        }
    }
    if (static_cast<int>(v.size()) != dim)
        throw input_error("vector argument has " + std::to_string(v.size()) +
                          " entries, expected " + std::to_string(dim));
    return v;
}

int run_verify(const GlobalFlags& g, const std::string& suite, int count,
               const std::string& out_path) {
    SuiteOptions opts;
    opts.seed = g.seed;
    opts.caps = caps_of(g);
    opts.count = count;
    if (!g.instance_path.empty()) {
        std::ifstream in(g.instance_path);
        if (!in) throw input_error("cannot open instance file '" + g.instance_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        opts.instance_text = buf.str();
    }

    std::vector<std::string> names;
    if (suite == "all") {
        for (const auto& n : suite_names())
            if (n != "instance-directives" || !opts.instance_text.empty()) names.push_back(n);
    } else {
        names.push_back(suite);
    }

    bool any_failed = false;
    std::ostringstream out;
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (const auto& name : names) {
        SuiteReport rep = run_suite(name, opts);
        any_failed = any_failed || !rep.ok();
        if (g.format == "text") out << rep.to_text() << "\n";
        else all.push_back(rep.to_json());
    }
    std::string rendered = g.format == "text" ? out.str() : all.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream of(out_path);
        of << rendered;
    }
    return any_failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"asymlin: exact calculus of asymmetric norms, quasi-metrics and "
                 "compact bilinear operators"};
    app.require_subcommand(1);
    app.fallthrough(true); // global flags may follow the verb

    GlobalFlags g;
    app.add_option("--seed", g.seed, "corpus seed");
    app.add_option("--dim-cap", g.dim_cap, "dimension cap for vertex enumeration");
    app.add_option("--generator-cap", g.generator_cap, "generator count cap");
    app.add_option("--eps", g.eps, "net radius (positive rational)");
    app.add_option("--format", g.format, "output format: text, json-like")
        ->check(CLI::IsMember({"text", "json", "json-like"}));
    app.add_option("-i,--instance", g.instance_path, "instance file (asymlin/1)");

    std::string arg_space, arg_point, arg_point2, arg_op, arg_tensor, arg_tensor2, arg_vector,
        arg_psi, arg_norm_space, arg_suite = "all", arg_out;
    bool flag_symmetric = false, flag_ball = false;
    int arg_count = 0;

    auto* c_eval = app.add_subcommand("eval", "evaluate an asymmetric norm at a point");
    c_eval->add_option("--space", arg_space)->required();
    c_eval->add_option("--point", arg_point)->required();

    auto* c_norm = app.add_subcommand("norm", "operator or bilinear operator norm");
    c_norm->add_option("--op", arg_op);
    c_norm->add_option("--tensor", arg_tensor);
    c_norm->add_flag("--symmetric", flag_symmetric, "use the symmetrized spaces");

    auto* c_dual = app.add_subcommand("dual", "dual norm of a functional or the dual ball");
    c_dual->add_option("--space", arg_space)->required();
    c_dual->add_option("--vector", arg_vector);
    c_dual->add_flag("--ball", flag_ball, "print the dual ball vertices");

    auto* c_adj = app.add_subcommand("adjoint", "adjoint norms and adjoint forms");
    c_adj->add_option("--op", arg_op);
    c_adj->add_option("--tensor", arg_tensor);
    c_adj->add_option("--psi", arg_psi, "target functional for the bilinear adjoint");

    auto* c_prec = app.add_subcommand("precompact", "decide precompactness of a unit ball");
    c_prec->add_option("--ball-of", arg_space, "space whose unit ball is examined")->required();
    c_prec->add_option("--norm", arg_norm_space, "covering norm")->required();

    auto* c_dist = app.add_subcommand("distance", "extended quasi-metric between operators");
    c_dist->add_option("--tensor", arg_tensor)->required();
    c_dist->add_option("--tensor2", arg_tensor2)->required();

    auto* c_net = app.add_subcommand("net", "Schauder covering net for a bilinear operator");
    c_net->add_option("--tensor", arg_tensor)->required();

    auto* c_verify = app.add_subcommand("verify", "run verification suites");
    c_verify->add_option("--suite", arg_suite, "suite name or 'all'");
    c_verify->add_option("--count", arg_count, "override the instance count");
    c_verify->add_option("--out", arg_out, "write the report to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_eval->parsed()) {
            auto f = load_instance(g);
            const AsymNorm& p = space_of(f, arg_space);
            std::cout << to_string(eval_norm(p, vec_arg(arg_point, p.dim))) << "\n";
        } else if (c_norm->parsed()) {
            auto f = load_instance(g);
            if (!arg_op.empty()) {
                LinearOp a = op_of(f, arg_op);
                if (flag_symmetric) {
                    a.source = symmetrize(a.source);
                    a.target = symmetrize(a.target);
                }
                std::cout << to_string(op_norm(a)) << "\n";
            } else if (!arg_tensor.empty()) {
                BilinearOp t = tensor_of(f, arg_tensor);
                std::cout << (flag_symmetric ? to_string(sym_norm(t, caps_of(g)))
                                             : to_string(bilin_norm(t, caps_of(g))))
                          << "\n";
            } else {
                throw input_error("norm needs --op or --tensor");
            }
        } else if (c_dual->parsed()) {
            auto f = load_instance(g);
            const AsymNorm& p = space_of(f, arg_space);
            if (flag_ball) {
                auto ball = dual_ball(p, caps_of(g));
                for (const auto& v : ball.v_rep->vertices)
                    std::cout << "vertex " << serialize_vector(v) << "\n";
                for (const auto& r : ball.v_rep->rays)
                    std::cout << "ray " << serialize_vector(r) << "\n";
            } else if (!arg_vector.empty()) {
                std::cout << to_string(dual_norm(p, vec_arg(arg_vector, p.dim))) << "\n";
            } else {
                throw input_error("dual needs --vector or --ball");
            }
        } else if (c_adj->parsed()) {
            auto f = load_instance(g);
            if (!arg_op.empty()) {
                LinearOp a = op_of(f, arg_op);
                auto adj = adjoint(a, caps_of(g));
                std::cout << "op-norm " << to_string(op_norm(a)) << "\n";
                std::cout << "adjoint-norm " << to_string(adjoint_norm(adj, a)) << "\n";
            } else if (!arg_tensor.empty()) {
                BilinearOp t = tensor_of(f, arg_tensor);
                if (arg_psi.empty()) {
                    std::cout << "bilinear-norm " << to_string(bilin_norm(t, caps_of(g))) << "\n";
                    std::cout << "adjoint-norm " << to_string(bilinear_adjoint_norm(t, caps_of(g)))
                              << "\n";
                } else {
                    auto psi = make_functional(vec_arg(arg_psi, t.target.dim), t.target);
                    auto form = bilinear_adjoint(t, psi);
                    for (const auto& row : form.matrix)
                        std::cout << "row " << serialize_vector(row) << "\n";
                    std::cout << "form-norm " << to_string(form_norm(form, caps_of(g))) << "\n";
                }
            } else {
                throw input_error("adjoint needs --op or --tensor");
            }
        } else if (c_prec->parsed()) {
            auto f = load_instance(g);
            const AsymNorm& ball_space = space_of(f, arg_space);
            const AsymNorm& q = space_of(f, arg_norm_space);
            auto region = enumerate_v_rep(unit_ball(ball_space), caps_of(g));
            auto verdict = polyhedron_precompact(region, q, eps_of(g));
            if (verdict.status == PrecompactStatus::Precompact) {
                std::cout << "precompact eps=" << to_string(eps_of(g)) << " net-size="
                          << verdict.certificate->net.size() << "\n";
            } else {
                std::cout << "not-precompact escaping-ray="
                          << serialize_vector(*verdict.escaping_ray) << "\n";
            }
        } else if (c_dist->parsed()) {
            auto f = load_instance(g);
            auto d = operator_distance(tensor_of(f, arg_tensor), tensor_of(f, arg_tensor2),
                                       caps_of(g));
            std::cout << "forward " << to_string(d.forward) << "\n";
            std::cout << "symmetric " << to_string(d.symmetric) << "\n";
        } else if (c_net->parsed()) {
            auto f = load_instance(g);
            BilinearOp t = tensor_of(f, arg_tensor);
            auto res = schauder_bilinear_net(t, eps_of(g), caps_of(g));
            std::cout << "image-net " << res.image.centers.size() << " pairs\n";
            std::cout << "dual-net " << res.dual_net.size() << " functionals\n";
            std::cout << "bound " << to_string(res.dual_radius) << " measured "
                      << to_string(res.measured_radius) << "\n";
            std::cout << (res.verified ? "verified" : "NOT VERIFIED") << "\n";
            return res.verified ? 0 : 1;
        } else if (c_verify->parsed()) {
            return run_verify(g, arg_suite, arg_count, arg_out);
        }
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const precondition_error& e) {
        std::cerr << "precondition failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

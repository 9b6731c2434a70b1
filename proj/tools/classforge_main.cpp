#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <gmpxx.h>

#include "classforge/errors.hpp"
#include "classforge/report.hpp"

namespace {

using classforge::invalid_input;

mpz_class parse_int(const std::string& s, const std::string& flag) {
  bool ok = !s.empty();
  for (std::size_t i = 0; i < s.size() && ok; ++i)
    ok = std::isdigit(static_cast<unsigned char>(s[i])) || (i == 0 && s[i] == '-');
  if (!ok || s == "-")
    throw invalid_input("bad-integer", flag + " expects a decimal integer, got '" + s + "'");
  return mpz_class(s);
}

long parse_long(const std::string& s, const std::string& flag) {
  mpz_class v = parse_int(s, flag);
  if (!v.fits_slong_p())
    throw invalid_input("bad-integer", flag + " is out of range");
  return v.get_si();
}

void emit(const std::string& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc | std::ios::binary);
  if (!out) throw invalid_input("bad-output", "cannot open " + out_path);
  out << doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"class groups, descent, and family scans for y^2 = x^3 + n"};
  app.require_subcommand(1);

  std::string cache_path;
  std::string budget_str;
  app.add_option("--cache", cache_path,
                 "JSON key-value result cache (env CLASSFORGE_CACHE)")
      ->envname("CLASSFORGE_CACHE");
  app.add_option("--budget", budget_str, "work budget for this invocation");

  std::string a_str, b_str, d_str, m_str, u_str, w_str, p_str, n_str, l_str;
  std::string m_from_str, m_to_str, from_str, to_str, bound_str;
  std::string format = "json", out_path;

  auto* torsion = app.add_subcommand("torsion", "rational torsion subgroup");
  torsion->add_option("--a", a_str)->required();
  torsion->add_option("--b", b_str)->required();

  auto* classgroup =
      app.add_subcommand("classgroup", "imaginary quadratic class group");
  classgroup->add_option("--d", d_str)->required();

  auto* cubic = app.add_subcommand("cubic", "pure cubic field class group");
  cubic->add_option("--m", m_str)->required();

  auto* specialize =
      app.add_subcommand("specialize", "norm-power ideal class and its order");
  specialize->add_option("--d", d_str)->required();
  specialize->add_option("--u", u_str)->required();
  specialize->add_option("--w", w_str)->required();
  specialize->add_option("--p", p_str)->required();

  auto* descent =
      app.add_subcommand("descent", "point search and x - theta descent");
  descent->add_option("--n", n_str)->required();
  descent->add_option("--search-bound", bound_str)->required();

  auto* scan = app.add_subcommand("scan", "quadratic family window");
  scan->add_option("--n", n_str)->required();
  scan->add_option("--l", l_str)->required();
  scan->add_option("--m-from", m_from_str)->required();
  scan->add_option("--m-to", m_to_str)->required();
  scan->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  scan->add_option("--out", out_path);

  auto* scan_cubic = app.add_subcommand("scan-cubic", "cubic family window");
  scan_cubic->add_option("--from", from_str)->required();
  scan_cubic->add_option("--to", to_str)->required();

  auto* audit =
      app.add_subcommand("audit", "check the source article's numbers");

  for (auto* sub : {torsion, classgroup, cubic, specialize, descent, scan,
                    scan_cubic, audit})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (!budget_str.empty()) {
      long budget = parse_long(budget_str, "--budget");
      if (budget <= 0)
        throw invalid_input("bad-budget", "--budget must be positive");
      classforge::set_work_budget(static_cast<std::uint64_t>(budget));
    }

    std::string key;
    std::function<std::string()> build;
    if (*torsion) {
      mpz_class a = parse_int(a_str, "--a"), b = parse_int(b_str, "--b");
      key = "torsion --a " + a.get_str() + " --b " + b.get_str();
      build = [=] { return classforge::report::torsion_report(a, b); };
    } else if (*classgroup) {
      mpz_class d = parse_int(d_str, "--d");
      key = "classgroup --d " + d.get_str();
      build = [=] { return classforge::report::classgroup_report(d); };
    } else if (*cubic) {
      mpz_class m = parse_int(m_str, "--m");
      key = "cubic --m " + m.get_str();
      build = [=] { return classforge::report::cubic_report(m); };
    } else if (*specialize) {
      mpz_class d = parse_int(d_str, "--d"), u = parse_int(u_str, "--u");
      mpz_class w = parse_int(w_str, "--w"), p = parse_int(p_str, "--p");
      key = "specialize --d " + d.get_str() + " --u " + u.get_str() +
            " --w " + w.get_str() + " --p " + p.get_str();
      build = [=] { return classforge::report::specialize_report(d, u, w, p); };
    } else if (*descent) {
      mpz_class n = parse_int(n_str, "--n");
      long bound = parse_long(bound_str, "--search-bound");
      key = "descent --n " + n.get_str() + " --search-bound " +
            std::to_string(bound);
      build = [=] { return classforge::report::descent_report(n, bound); };
    } else if (*scan) {
      mpz_class n = parse_int(n_str, "--n"), l = parse_int(l_str, "--l");
      mpz_class mf = parse_int(m_from_str, "--m-from");
      mpz_class mt = parse_int(m_to_str, "--m-to");
      key = "scan --n " + n.get_str() + " --l " + l.get_str() + " --m-from " +
            mf.get_str() + " --m-to " + mt.get_str() + " --format " + format;
      build = [=] {
        return classforge::report::scan_report(n, l, mf, mt, format);
      };
    } else if (*scan_cubic) {
      mpz_class f = parse_int(from_str, "--from"), t = parse_int(to_str, "--to");
      key = "scan-cubic --from " + f.get_str() + " --to " + t.get_str();
      build = [=] { return classforge::report::scan_cubic_report(f, t); };
    } else if (*audit) {
      key = "audit";
      build = [] { return classforge::report::audit_report(); };
    }

    std::string doc = cache_path.empty()
                          ? build()
                          : classforge::report::cache_through(cache_path, key,
                                                              build);
    emit(doc, out_path);
    return 0;
  } catch (const classforge::invalid_input& e) {
    std::cerr << "invalid input (" << e.code() << "): " << e.what() << "\n";
    return 2;
  } catch (const classforge::limit_exceeded& e) {
    std::cerr << "limit exceeded (" << e.code() << "): " << e.what() << "\n";
    return 3;
  }
}

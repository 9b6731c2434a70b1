#ifndef CLASSFORGE_REPORT_HPP
#define CLASSFORGE_REPORT_HPP

#include <gmpxx.h>

#include <functional>
#include <string>

// Deterministic report documents for the CLI: JSON with sorted keys, every
// number rendered as a decimal string, byte-identical across reruns.  The
// scan report can also render as CSV (header row, rows only, no quoting).

namespace classforge::report {

std::string torsion_report(const mpz_class& a, const mpz_class& b);
std::string classgroup_report(const mpz_class& d);
std::string cubic_report(const mpz_class& m);
std::string specialize_report(const mpz_class& d, const mpz_class& u,
                              const mpz_class& w, const mpz_class& p);
std::string descent_report(const mpz_class& n, long search_bound);
std::string scan_report(const mpz_class& n, const mpz_class& l,
                        const mpz_class& m_from, const mpz_class& m_to,
                        const std::string& format);  // "json" | "csv"
std::string scan_cubic_report(const mpz_class& from, const mpz_class& to);

// Checks the source article's concrete numbers against computed values;
// statuses are match / mismatch / not-comparable.
std::string audit_report();

// Key-value cache over a JSON file.  The whole request runs under an
// exclusive flock; a held lock raises invalid_input (callers exit 2).
// Returns the stored document, or computes it via compute() and stores it.
std::string cache_through(const std::string& path, const std::string& key,
                          const std::function<std::string()>& compute);

}  // namespace classforge::report

#endif

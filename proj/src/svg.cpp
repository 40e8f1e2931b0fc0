#include "addt/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace addt::svg {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v, int prec = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

/// One plotting panel with linear axes mapped into a pixel rectangle.
class Panel {
public:
    Panel(double left, double top, double width, double height) : left_(left), top_(top), w_(width), h_(height) {}

    void set_range(double x0, double x1, double y0, double y1) {
        if (x1 <= x0) x1 = x0 + 1.0;
        if (y1 <= y0) y1 = y0 + 1.0;
        x0_ = x0; x1_ = x1; y0_ = y0; y1_ = y1;
    }

    double px(double x) const { return left_ + (x - x0_) / (x1_ - x0_) * w_; }
    double py(double y) const { return top_ + h_ - (y - y0_) / (y1_ - y0_) * h_; }

    void frame(std::ostringstream& os, const std::string& xlabel, const std::string& ylabel,
               const std::string& title) const {
        os << "<rect x=\"" << fmt(left_) << "\" y=\"" << fmt(top_) << "\" width=\"" << fmt(w_) << "\" height=\""
           << fmt(h_) << "\" fill=\"none\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << fmt(left_ + w_ / 2) << "\" y=\"" << fmt(top_ + h_ + 38)
           << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
        os << "<text x=\"" << fmt(left_ - 52) << "\" y=\"" << fmt(top_ + h_ / 2)
           << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 " << fmt(left_ - 52) << ' '
           << fmt(top_ + h_ / 2) << ")\">" << escape(ylabel) << "</text>\n";
        os << "<text x=\"" << fmt(left_ + w_ / 2) << "\" y=\"" << fmt(top_ - 10)
           << "\" text-anchor=\"middle\" font-size=\"14\" font-weight=\"bold\">" << escape(title) << "</text>\n";
    }

    template <class Label>
    void xticks(std::ostringstream& os, const std::vector<double>& at, Label label) const {
        for (double v : at) {
            os << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(top_ + h_) << "\" x2=\"" << fmt(px(v))
               << "\" y2=\"" << fmt(top_ + h_ + 5) << "\" stroke=\"#333\"/>\n";
            os << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(top_ + h_ + 18)
               << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(label(v)) << "</text>\n";
        }
    }

    template <class Label>
    void yticks(std::ostringstream& os, const std::vector<double>& at, Label label) const {
        for (double v : at) {
            os << "<line x1=\"" << fmt(left_ - 5) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(left_)
               << "\" y2=\"" << fmt(py(v)) << "\" stroke=\"#333\"/>\n";
            os << "<text x=\"" << fmt(left_ - 8) << "\" y=\"" << fmt(py(v) + 4)
               << "\" text-anchor=\"end\" font-size=\"11\">" << escape(label(v)) << "</text>\n";
        }
    }

    void polyline(std::ostringstream& os, const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  const std::string& extra = "") const {
        os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.8\" " << extra << " points=\"";
        for (const auto& [x, y] : pts) os << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
        os << "\"/>\n";
    }

    double left() const { return left_; }
    double top() const { return top_; }
    double width() const { return w_; }
    double height() const { return h_; }

private:
    double left_, top_, w_, h_;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
    return out;
}

std::string open_svg(int width, int height) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return os.str();
}

void legend(std::ostringstream& os, double x, double y, const std::vector<std::pair<std::string, std::string>>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double yy = y + 18.0 * static_cast<double>(i);
        os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(yy - 9) << "\" width=\"12\" height=\"12\" fill=\""
           << items[i].second << "\"/>\n";
        os << "<text x=\"" << fmt(x + 18) << "\" y=\"" << fmt(yy + 2) << "\" font-size=\"12\">"
           << escape(items[i].first) << "</text>\n";
    }
}

}  // namespace

std::string fit_paths(const Dataset& d, const io::Analysis& a, Method m) {
    const bool have = (m == Method::TM && a.tm) || (m == Method::PM && a.pm) || (m == Method::SPM && a.spm);
    if (!have) throw Error("no fitted " + std::string(method_name(m)) + " model to plot");

    double tmax = 0.0, ymax = 0.0, ymin = 0.0;
    for (const auto& level : d.levels()) {
        tmax = std::max(tmax, level.max_time());
        for (const auto& b : level.batches)
            for (double y : b.responses) {
                ymax = std::max(ymax, y);
                ymin = std::min(ymin, y);
            }
    }
    for (double y : d.baseline()) ymax = std::max(ymax, y);

    std::ostringstream os;
    os << open_svg(760, 520);
    Panel panel(80, 40, 520, 400);
    panel.set_range(0.0, tmax * 1.05, ymin, ymax * 1.08);
    panel.frame(os, "Time (hours)", "Response", std::string(method_name(m)) + " fitted degradation paths");
    panel.xticks(os, nice_ticks(0.0, tmax * 1.05), [](double v) { return fmt(v, 0); });
    panel.yticks(os, nice_ticks(ymin, ymax * 1.08), [](double v) { return fmt(v, 0); });

    std::vector<std::pair<std::string, std::string>> keys;
    for (double y : d.baseline())
        os << "<circle cx=\"" << fmt(panel.px(0.0)) << "\" cy=\"" << fmt(panel.py(y))
           << "\" r=\"2.5\" fill=\"#555\"/>\n";

    for (std::size_t i = 0; i < d.levels().size(); ++i) {
        const auto& level = d.levels()[i];
        const std::string c = color(i);
        keys.emplace_back(fmt(level.temp_c, 0) + " C", c);
        for (const auto& b : level.batches)
            for (double y : b.responses)
                os << "<circle cx=\"" << fmt(panel.px(b.time)) << "\" cy=\"" << fmt(panel.py(y))
                   << "\" r=\"2.5\" fill=\"" << c << "\" fill-opacity=\"0.7\"/>\n";

        std::vector<std::pair<double, double>> path;
        const double t_end = (m == Method::TM) ? level.max_time() : tmax * 1.05;
        for (int k = 0; k <= 200; ++k) {
            const double t = t_end * k / 200.0;
            double y = 0.0;
            if (m == Method::TM) {
                const auto& interp = a.tm->levels[i];
                if (interp.poly.coeffs.empty()) break;
                y = interp.poly(t);
            } else if (m == Method::PM) {
                y = parametric::mu(t, level.x, a.pm->params);
            } else {
                y = a.spm->model.mean(t, level.x);
            }
            path.emplace_back(t, std::clamp(y, ymin, ymax * 1.08));
        }
        if (!path.empty()) panel.polyline(os, path, c);
    }

    double yf = 0.0;
    if (m == Method::TM) yf = a.tm->y_f;
    else if (m == Method::PM) yf = a.report.p * a.pm->params.alpha;
    else yf = a.report.p * a.spm->model.spline.g0;
    panel.polyline(os, {{0.0, yf}, {tmax * 1.05, yf}}, "#000", "stroke-dasharray=\"6 4\"");
    keys.emplace_back("threshold", "#000");
    legend(os, 620, 60, keys);
    os << "</svg>\n";
    return os.str();
}

std::string ti_lines(const io::Analysis& a) {
    const auto& r = a.report;
    std::vector<const io::MethodReport*> fitted;
    for (const auto& m : r.methods)
        if (m.ok) fitted.push_back(&m);

    // Temperature axis from just below the lowest TI to a bit above the data.
    double t_lo = std::numeric_limits<double>::infinity(), t_hi = -t_lo;
    for (const auto* m : fitted) {
        t_lo = std::min(t_lo, m->ti);
        t_hi = std::max(t_hi, m->ti);
    }
    if (a.tm)
        for (const auto& lv : a.tm->levels) t_hi = std::max(t_hi, lv.temp_c);
    if (!std::isfinite(t_lo)) {
        t_lo = 20.0;
        t_hi = 300.0;
    }
    t_lo -= 20.0;
    t_hi += 20.0;
    const double x_lo = celsius_to_x(t_hi), x_hi = celsius_to_x(t_lo);
    const double logt_d = std::log10(r.target_time);

    double ylo = logt_d, yhi = logt_d;
    for (const auto* m : fitted)
        for (double x : {x_lo, x_hi}) {
            ylo = std::min(ylo, m->line.log10_time(x));
            yhi = std::max(yhi, m->line.log10_time(x));
        }
    ylo = std::floor(ylo) - 0.5;
    yhi = std::ceil(yhi) + 0.5;

    std::ostringstream os;
    os << open_svg(760, 520);
    Panel panel(80, 40, 520, 400);
    // Hotter temperatures on the right: plot -x.
    panel.set_range(-x_hi, -x_lo, ylo, yhi);
    panel.frame(os, "Temperature (C), reciprocal absolute scale", "Time (hours, log10)",
                "Temperature-time relationship and TI");
    std::vector<double> ticks;
    for (double c : nice_ticks(t_lo, t_hi)) ticks.push_back(-celsius_to_x(c));
    panel.xticks(os, ticks, [](double v) { return fmt(x_to_celsius(-v), 0); });
    panel.yticks(os, nice_ticks(ylo, yhi), [](double v) { return "1e" + fmt(v, 0); });
    panel.polyline(os, {{-x_hi, logt_d}, {-x_lo, logt_d}}, "#777", "stroke-dasharray=\"4 4\"");

    std::vector<std::pair<std::string, std::string>> keys;
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        const auto* m = fitted[i];
        const std::string c = color(i);
        panel.polyline(os, {{-x_hi, m->line.log10_time(x_hi)}, {-x_lo, m->line.log10_time(x_lo)}}, c);
        const double xd = celsius_to_x(m->ti);
        os << "<circle cx=\"" << fmt(panel.px(-xd)) << "\" cy=\"" << fmt(panel.py(logt_d)) << "\" r=\"5\" fill=\""
           << c << "\"/>\n";
        keys.emplace_back(std::string(method_name(m->method)) + ": TI " + fmt(m->ti, 0) + " C", c);
    }
    if (a.tm) {
        for (const auto& lv : a.tm->levels)
            if (lv.failure_time)
                os << "<rect x=\"" << fmt(panel.px(-lv.x) - 3.5) << "\" y=\""
                   << fmt(panel.py(std::log10(*lv.failure_time)) - 3.5)
                   << "\" width=\"7\" height=\"7\" fill=\"none\" stroke=\"#000\"/>\n";
    }
    legend(os, 620, 60, keys);
    os << "</svg>\n";
    return os.str();
}

std::string study_bars(const sim::StudySummary& s) {
    std::vector<std::string> methods;
    std::vector<int> scenarios;
    double top = 1.0;
    for (const auto& r : s.rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end())
            scenarios.push_back(r.scenario);
        if (r.valid) top = std::max({top, r.bias, r.sd, r.rmse});
    }
    top *= 1.1;

    const std::pair<const char*, double sim::SummaryRow::*> stats[] = {
        {"Bias", &sim::SummaryRow::bias}, {"SD", &sim::SummaryRow::sd}, {"RMSE", &sim::SummaryRow::rmse}};
    const double panel_w = 300.0;
    std::ostringstream os;
    os << open_svg(1080, 420);
    for (std::size_t k = 0; k < std::size(stats); ++k) {
        Panel panel(70.0 + static_cast<double>(k) * (panel_w + 50.0), 40, panel_w, 300);
        panel.set_range(0.0, static_cast<double>(scenarios.size()), 0.0, top);
        panel.frame(os, "Scenario", "Degrees C", stats[k].first);
        panel.yticks(os, nice_ticks(0.0, top), [](double v) { return fmt(v, 0); });
        std::vector<double> centers;
        for (std::size_t i = 0; i < scenarios.size(); ++i) centers.push_back(static_cast<double>(i) + 0.5);
        panel.xticks(os, centers, [&](double v) { return std::to_string(scenarios[static_cast<std::size_t>(v)]); });

        const double group = 0.8, bar = group / static_cast<double>(std::max<std::size_t>(1, methods.size()));
        for (std::size_t i = 0; i < scenarios.size(); ++i) {
            for (std::size_t j = 0; j < methods.size(); ++j) {
                const auto* row = s.find(scenarios[i], methods[j]);
                if (!row || !row->valid) continue;
                const double x0 = static_cast<double>(i) + 0.1 + bar * static_cast<double>(j);
                const double v = (*row).*(stats[k].second);
                os << "<rect x=\"" << fmt(panel.px(x0)) << "\" y=\"" << fmt(panel.py(v)) << "\" width=\""
                   << fmt(panel.px(x0 + bar) - panel.px(x0)) << "\" height=\"" << fmt(panel.py(0.0) - panel.py(v))
                   << "\" fill=\"" << color(j) << "\"/>\n";
            }
        }
    }
    std::vector<std::pair<std::string, std::string>> keys;
    for (std::size_t j = 0; j < methods.size(); ++j) keys.emplace_back(methods[j], color(j));
    for (std::size_t j = 0; j < keys.size(); ++j) legend(os, 70.0 + 90.0 * static_cast<double>(j), 395, {keys[j]});
    os << "</svg>\n";
    return os.str();
}

}  // namespace addt::svg

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "infotrack/angles.hpp"
#include "infotrack/episode_log.hpp"
#include "infotrack/errors.hpp"

namespace infotrack {

/// 1-sigma ellipse of a 2x2 position covariance: semi-axes are the square
/// roots of the eigenvalues, the major axis is aligned with the leading
/// eigenvector.
struct EllipseParams {
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double angle = 0.0;  // radians, world frame
};

inline EllipseParams covariance_ellipse(const Eigen::Matrix2d& cov) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const Eigen::Vector2d evals = es.eigenvalues();  // ascending
  const Eigen::Vector2d major = es.eigenvectors().col(1);
  EllipseParams e;
  e.semi_major = std::sqrt(std::max(evals(1), 0.0));
  e.semi_minor = std::sqrt(std::max(evals(0), 0.0));
  e.angle = std::atan2(major.y(), major.x());
  return e;
}

namespace render_detail {

class SvgCanvas {
 public:
  SvgCanvas(const Rect& world, double px_width) {
    const double w = world.width(), h = world.height();
    scale_ = (px_width - 2 * margin_) / std::max(w, h);
    width_ = 2 * margin_ + w * scale_;
    height_ = 2 * margin_ + h * scale_;
    world_ = world;
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
          << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
    body_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  double px(double x) const { return margin_ + (x - world_.xmin) * scale_; }
  double py(double y) const { return height_ - margin_ - (y - world_.ymin) * scale_; }
  double len(double meters) const { return meters * scale_; }

  void rect(const Rect& r, const std::string& fill, const std::string& stroke) {
    body_ << "<rect x=\"" << px(r.xmin) << "\" y=\"" << py(r.ymax) << "\" width=\"" << len(r.width())
          << "\" height=\"" << len(r.height()) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
          << "\"/>\n";
  }

  void circle(double x, double y, double radius_m, const std::string& fill, double opacity = 1.0) {
    body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"" << std::max(len(radius_m), 1.0)
          << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\"/>\n";
  }

  void ellipse(double x, double y, const EllipseParams& e, const std::string& fill,
               double opacity) {
    body_ << "<ellipse cx=\"0\" cy=\"0\" rx=\"" << len(e.semi_major) << "\" ry=\"" << len(e.semi_minor)
          << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" transform=\"translate("
          << px(x) << "," << py(y) << ") rotate(" << -e.angle * 180.0 / kPi << ")\"/>\n";
  }

  void polyline(const std::vector<Vec2>& pts, const std::string& stroke, double width = 1.0) {
    if (pts.size() < 2) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
          << "\" points=\"";
    for (const auto& p : pts) body_ << px(p.x()) << "," << py(p.y()) << " ";
    body_ << "\"/>\n";
  }

  /// Robot marker: isoceles triangle pointing along theta.
  void robot(const Pose& p, double size_m, const std::string& fill) {
    const double c = std::cos(p.theta), s = std::sin(p.theta);
    auto vertex = [&](double fx, double fy) {
      const double wx = p.x + fx * c - fy * s;
      const double wy = p.y + fx * s + fy * c;
      return std::pair<double, double>{px(wx), py(wy)};
    };
    const auto tip = vertex(size_m, 0.0);
    const auto left = vertex(-0.6 * size_m, 0.5 * size_m);
    const auto right = vertex(-0.6 * size_m, -0.5 * size_m);
    body_ << "<polygon fill=\"" << fill << "\" points=\"" << tip.first << "," << tip.second << " "
          << left.first << "," << left.second << " " << right.first << "," << right.second
          << "\"/>\n";
  }

  void write(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open figure for writing: " + path);
    out << body_.str() << "</svg>\n";
  }

 private:
  std::ostringstream body_;
  Rect world_;
  double scale_ = 1.0, width_ = 0.0, height_ = 0.0, margin_ = 20.0;
};

inline const LogState* state_at(const EpisodeLog& log, int frame) {
  if (frame == 0) return log.initial ? &*log.initial : nullptr;
  if (frame >= 1 && frame <= static_cast<int>(log.steps.size())) {
    return &log.steps[static_cast<std::size_t>(frame - 1)].state;
  }
  throw ConfigError("frame index out of range: " + std::to_string(frame));
}

}  // namespace render_detail

/// Renders one frame of an episode as SVG: map outline, obstacles, robot pose
/// and trail, true targets and trails, belief means and 1-sigma covariance
/// ellipses.
inline void render_frame(const EpisodeLog& log, int frame, const std::string& path) {
  using render_detail::SvgCanvas;
  SvgCanvas svg(log.map.bounds, 640.0);
  svg.rect(log.map.bounds, "none", "black");
  for (const auto& o : log.map.obstacles) svg.rect(o, "#b0b0b0", "black");

  const LogState* now = render_detail::state_at(log, frame);
  if (now != nullptr) {
    std::vector<Vec2> robot_trail;
    std::vector<std::vector<Vec2>> target_trails(now->targets.size());
    for (int f = 0; f <= frame; ++f) {
      const LogState* s = render_detail::state_at(log, f);
      if (s == nullptr) continue;
      robot_trail.push_back(s->robot.position());
      for (std::size_t i = 0; i < s->targets.size(); ++i) {
        target_trails[i].push_back(s->targets[i].head<2>());
      }
    }
    svg.polyline(robot_trail, "#1f4fd8", 1.5);
    for (std::size_t i = 0; i < now->targets.size(); ++i) {
      svg.polyline(target_trails[i], "#d84a4a", 1.0);
      for (const auto& p : target_trails[i]) svg.circle(p.x(), p.y(), 0.12, "#d84a4a", 0.5);
    }
    for (std::size_t i = 0; i < now->means.size(); ++i) {
      const EllipseParams e = covariance_ellipse(now->cov_pos[i]);
      svg.ellipse(now->means[i](0), now->means[i](1), e, "#3fa34d", 0.25);
      svg.circle(now->means[i](0), now->means[i](1), 0.25, "#3fa34d");
    }
    for (const auto& t : now->targets) svg.circle(t(0), t(1), 0.35, "#d84a4a");
    svg.robot(now->robot, 1.0, "#1f4fd8");
  }
  svg.write(path);
}

/// Flat table of every plotted quantity, one row per (frame, target).
inline void write_data_table(const EpisodeLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open data table for writing: " + path);
  out << "t,robot_x,robot_y,robot_theta,target,target_px,target_py,target_vx,target_vy,"
         "mean_px,mean_py,mean_vx,mean_vy,cov_xx,cov_xy,cov_yy,logdet,observed,action,reward\n";
  out.precision(17);
  const int last = static_cast<int>(log.steps.size());
  for (int f = 0; f <= last; ++f) {
    const LogState* s = render_detail::state_at(log, f);
    if (s == nullptr) continue;
    const int action = f == 0 ? -1 : log.steps[static_cast<std::size_t>(f - 1)].action;
    const double reward = f == 0 ? 0.0 : log.steps[static_cast<std::size_t>(f - 1)].reward;
    for (std::size_t i = 0; i < s->targets.size(); ++i) {
      out << f << ',' << s->robot.x << ',' << s->robot.y << ',' << s->robot.theta << ',' << i << ','
          << s->targets[i](0) << ',' << s->targets[i](1) << ',' << s->targets[i](2) << ','
          << s->targets[i](3) << ',' << s->means[i](0) << ',' << s->means[i](1) << ','
          << s->means[i](2) << ',' << s->means[i](3) << ',' << s->cov_pos[i](0, 0) << ','
          << s->cov_pos[i](0, 1) << ',' << s->cov_pos[i](1, 1) << ',' << s->logdet[i] << ','
          << s->observed[i] << ',' << action << ',' << reward << "\n";
    }
  }
}

/// Renders the requested frames (default: the final frame) plus the data
/// table into out_dir, returning the written file paths.
inline std::vector<std::string> render_episode(const EpisodeLog& log, std::vector<int> frames,
                                               const std::string& out_dir,
                                               const std::string& stem = "frame") {
  std::filesystem::create_directories(out_dir);
  if (frames.empty()) frames.push_back(static_cast<int>(log.steps.size()));
  std::vector<std::string> written;
  for (int f : frames) {
    const std::string path = out_dir + "/" + stem + "_" + std::to_string(f) + ".svg";
    render_frame(log, f, path);
    written.push_back(path);
  }
  const std::string table = out_dir + "/" + stem + "_data.csv";
  write_data_table(log, table);
  written.push_back(table);
  return written;
}

}  // namespace infotrack

#include "fs_util.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "lakelet/error.hpp"

namespace lakelet::fs_util {
namespace {

std::string errno_message(const std::string& what, const std::filesystem::path& p) {
  return what + " " + p.string() + ": " + std::strerror(errno);
}

std::string random_suffix() {
  static std::atomic<uint64_t> counter{0};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream os;
  os << std::hex << ::getpid() << '-' << counter.fetch_add(1) << '-' << (rng() & 0xffffff);
  return os.str();
}

}  // namespace

bool is_temp_name(std::string_view filename) {
  return filename.find(kTempMarker) != std::string_view::npos;
}

std::filesystem::path staging_path(const std::filesystem::path& target) {
  return target.parent_path() /
         ("." + target.filename().string() + std::string(kTempMarker) + random_suffix());
}

void write_synced(const std::filesystem::path& path, std::string_view data) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw_error(ErrorCode::kIoError, errno_message("open", path));
  const char* p = data.data();
  size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      std::string msg = errno_message("write", path);
      ::close(fd);
      throw_error(ErrorCode::kIoError, msg);
    }
    p += n;
    left -= static_cast<size_t>(n);
  }
  if (::fsync(fd) != 0) {
    std::string msg = errno_message("fsync", path);
    ::close(fd);
    throw_error(ErrorCode::kIoError, msg);
  }
  if (::close(fd) != 0) throw_error(ErrorCode::kIoError, errno_message("close", path));
}

void fsync_dir(const std::filesystem::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

void write_atomic(const std::filesystem::path& target, std::string_view data) {
  auto staged = staging_path(target);
  try {
    write_synced(staged, data);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(staged, ec);
    throw;
  }
  if (::rename(staged.c_str(), target.c_str()) != 0) {
    std::string msg = errno_message("rename", target);
    std::error_code ec;
    std::filesystem::remove(staged, ec);
    throw_error(ErrorCode::kIoError, msg);
  }
  fsync_dir(target.parent_path());
}

bool write_atomic_no_replace(const std::filesystem::path& target, std::string_view data) {
  auto staged = staging_path(target);
  try {
    write_synced(staged, data);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(staged, ec);
    throw;
  }
  // link(2) refuses to clobber an existing name, which rename(2) would not.
  int rc = ::link(staged.c_str(), target.c_str());
  int saved = errno;
  std::error_code ec;
  std::filesystem::remove(staged, ec);
  if (rc != 0) {
    if (saved == EEXIST) return false;
    errno = saved;
    throw_error(ErrorCode::kIoError, errno_message("link", target));
  }
  fsync_dir(target.parent_path());
  return true;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kMissingObject, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw_error(ErrorCode::kIoError, "read failed: " + path.string());
  return ss.str();
}

}  // namespace lakelet::fs_util

#pragma once

#include <stdexcept>
#include <string>

namespace wmterrain {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameterError : public Error
{
public:
    using Error::Error;
};

/// Input is degenerate for the operation (constant grid, empty interior, ...).
class DegenerateInputError : public Error
{
public:
    using Error::Error;
};

class SizeMismatchError : public Error
{
public:
    using Error::Error;
};

class EmptyInputError : public Error
{
public:
    using Error::Error;
};

class ResourceError : public Error
{
public:
    using Error::Error;
};

class OutOfBoundsError : public Error
{
public:
    using Error::Error;
};

/// Raised by the mission sampler when the retry cap is exhausted.
class NoValidMissionError : public Error
{
public:
    using Error::Error;
};

/// A file the caller expected to exist is missing or unreadable.
class MissingInputError : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace wmterrain

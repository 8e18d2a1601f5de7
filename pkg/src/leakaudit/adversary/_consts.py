SQUARED = 0
LOG = 1
SGD = 0
ADAM = 1

# log-loss squashing clamp and Adam denominator guard
LOG_EPS = 1e-6
ADAM_EPS = 1e-7

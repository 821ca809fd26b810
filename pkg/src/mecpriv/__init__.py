"""Privacy-aware task-offloading laboratory.

Simulates a single device offloading compute tasks to an edge server over
a two-state wireless channel, scores privacy as windowed entropy of the
observable offloading pattern, trains feed-forward and recurrent
Q-learning agents on the combined cost/privacy reward, and evaluates how
well a compromised-server adversary can invert the observed volumes.
"""

__version__ = "0.1.0"

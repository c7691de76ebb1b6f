"""LTL task planning on labelled POMDPs with recurrent deep Q-learning."""

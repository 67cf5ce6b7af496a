"""Minimax risk classifiers learned by linear programming."""

"""
Gradient-based L2 attacks on (smoothed) classifiers and accuracy-under-attack
curves.
"""
from .pgd import (AttackConfig, AttackResult, pgd_attack, semantic_check_annular, attack_dataset,
                  curve_from_attacks, attack_curve, ATTACK_COLUMNS)

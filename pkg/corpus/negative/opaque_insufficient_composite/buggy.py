qc = QuantumCircuit(4, 4)
g1 = Gate('custom_a', 3, [])
g2 = Gate('custom_b', 4, [])
qc.append(g1, [0, 1, 2])
qc.append(g2, [0, 1, 2, 3])
...

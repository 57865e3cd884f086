qc = QuantumCircuit(4, 4)
sub = QuantumCircuit(4, name='sub')
g1 = sub.to_instruction()
qc.append(g1, [0, 1, 2, 3])
...

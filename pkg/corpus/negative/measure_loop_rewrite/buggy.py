qreg = QuantumRegister(5)
creg = ClassicalRegister(5)
circ = QuantumCircuit(qreg, creg)
for i in range(5):
    circ.measure(qreg[i], creg[i])
...

qreg = QuantumRegister(5)
creg = ClassicalRegister(5)
circ = QuantumCircuit(qreg, creg)
for i in range(4+1):
    circ.measure(qreg[i], creg[i])
...
